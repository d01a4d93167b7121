// Copyright 2026 The Prosoval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosoval/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "prosoval/error.hpp"
#include "prosoval/kernels.hpp"

namespace prosoval {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRmsSilenceGate = 1e-4;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t samples_from_seconds(double seconds, int sample_rate_hz) {
  return static_cast<std::size_t>(std::lround(seconds * sample_rate_hz));
}

// One triangular mel filter as a dense weight run over FFT bins.
struct MelFilter {
  std::size_t first_bin = 0;
  std::vector<double> weights;
};

std::vector<MelFilter> build_mel_filterbank(int n_mels, int n_fft,
                                            int sample_rate_hz, double fmin,
                                            double fmax) {
  const std::size_t n_bins = static_cast<std::size_t>(n_fft) / 2 + 1;
  const double bin_hz = static_cast<double>(sample_rate_hz) / n_fft;
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);

  std::vector<double> edges_hz(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges_hz.size(); ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_mels + 1);
    edges_hz[i] = mel_to_hz(mel);
  }

  std::vector<MelFilter> bank(static_cast<std::size_t>(n_mels));
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges_hz[m];
    const double center = edges_hz[m + 1];
    const double right = edges_hz[m + 2];
    MelFilter& filter = bank[m];
    std::vector<double> weights;
    std::size_t first = 0;
    bool started = false;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      double wgt = 0.0;
      if (f > left && f < right) {
        wgt = f <= center ? (f - left) / (center - left)
                          : (right - f) / (right - center);
      }
      if (wgt > 0.0) {
        if (!started) {
          first = k;
          started = true;
        }
        weights.push_back(wgt);
      } else if (started) {
        break;
      }
    }
    filter.first_bin = first;
    filter.weights = std::move(weights);
  }
  return bank;
}

// DCT-II rows k=1..13, orthonormal scaling sqrt(2/M).
std::vector<double> build_dct_rows(int n_mels) {
  std::vector<double> rows(MfccMatrix::kCoeffs * static_cast<std::size_t>(n_mels));
  const double scale = std::sqrt(2.0 / n_mels);
  for (std::size_t k = 1; k <= MfccMatrix::kCoeffs; ++k) {
    for (int m = 0; m < n_mels; ++m) {
      rows[(k - 1) * n_mels + m] =
          scale * std::cos(kPi * static_cast<double>(k) * (m + 0.5) / n_mels);
    }
  }
  return rows;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

void FeatureConfig::validate() const {
  if (!(frame_len_s > 0.0)) {
    raise(ErrorCategory::configuration, "frame_len_s must be positive");
  }
  if (!(hop_s > 0.0) || hop_s > frame_len_s) {
    raise(ErrorCategory::configuration,
          "hop_s must satisfy 0 < hop_s <= frame_len_s");
  }
  if (!is_power_of_two(n_fft)) {
    raise(ErrorCategory::configuration, "n_fft must be a power of two");
  }
  if (n_mels < 14) {
    raise(ErrorCategory::configuration, "n_mels must be at least 14");
  }
  if (mel_fmin_hz < 0.0 || (mel_fmax_hz != 0.0 && mel_fmax_hz <= mel_fmin_hz)) {
    raise(ErrorCategory::configuration, "invalid mel band edges");
  }
  if (!(log_floor > 0.0)) {
    raise(ErrorCategory::configuration, "log_floor must be positive");
  }
  if (!(f0_min_hz > 0.0) || f0_min_hz >= f0_max_hz) {
    raise(ErrorCategory::configuration,
          "f0 band must satisfy 0 < f0_min < f0_max");
  }
  if (!(yin_threshold > 0.0) || yin_threshold >= 1.0) {
    raise(ErrorCategory::configuration, "yin_threshold must be in (0, 1)");
  }
}

namespace featuredetail {

void fft(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n) {
    raise(ErrorCategory::contract, "fft requires power-of-two complex input");
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const double wr = std::cos(angle);
    const double wi = std::sin(angle);
    for (std::size_t start = 0; start < n; start += len) {
      double cr = 1.0;
      double ci = 0.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::size_t a = start + k;
        const std::size_t b = a + len / 2;
        const double tr = re[b] * cr - im[b] * ci;
        const double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

std::size_t yin_window(int sample_rate_hz, double f0_min_hz) {
  const auto max_lag =
      static_cast<std::size_t>(std::ceil(sample_rate_hz / f0_min_hz));
  return 2 * max_lag;
}

}  // namespace featuredetail

MfccMatrix compute_mfcc(const Waveform& w, const FeatureConfig& cfg) {
  cfg.validate();
  if (w.samples.empty()) {
    raise(ErrorCategory::validation, "compute_mfcc: empty waveform");
  }
  const std::size_t frame_len = samples_from_seconds(cfg.frame_len_s, w.sample_rate_hz);
  const std::size_t hop = samples_from_seconds(cfg.hop_s, w.sample_rate_hz);
  if (hop < 1 || frame_len < hop) {
    raise(ErrorCategory::configuration, "frame/hop resolve to invalid sample counts");
  }
  if (frame_len > static_cast<std::size_t>(cfg.n_fft)) {
    raise(ErrorCategory::configuration, "n_fft shorter than the analysis frame");
  }
  const FrameGrid grid = frame_grid(w, frame_len, hop);
  if (grid.n_frames == 0) {
    raise(ErrorCategory::validation,
          "compute_mfcc: signal shorter than one analysis frame");
  }

  const double fmax = cfg.mel_fmax_hz > 0.0 ? cfg.mel_fmax_hz : w.sample_rate_hz / 2.0;
  if (fmax > w.sample_rate_hz / 2.0 + 1e-9) {
    raise(ErrorCategory::configuration, "mel_fmax_hz above Nyquist");
  }
  const auto bank = build_mel_filterbank(cfg.n_mels, cfg.n_fft, w.sample_rate_hz,
                                         cfg.mel_fmin_hz, fmax);
  const auto dct_rows = build_dct_rows(cfg.n_mels);

  // Periodic Hann window.
  std::vector<double> window(frame_len);
  for (std::size_t n = 0; n < frame_len; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                     static_cast<double>(frame_len));
  }

  MfccMatrix out;
  out.n_frames = grid.n_frames;
  out.hop_s = static_cast<double>(hop) / w.sample_rate_hz;
  out.coeffs.resize(grid.n_frames * MfccMatrix::kCoeffs);

  const std::size_t n_bins = static_cast<std::size_t>(cfg.n_fft) / 2 + 1;
  std::vector<double> re(static_cast<std::size_t>(cfg.n_fft));
  std::vector<double> im(static_cast<std::size_t>(cfg.n_fft));
  std::vector<double> magnitude(n_bins);
  std::vector<double> log_energies(static_cast<std::size_t>(cfg.n_mels));

  for (std::size_t t = 0; t < grid.n_frames; ++t) {
    const auto frame = frame_window(w, grid, t);
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (std::size_t n = 0; n < frame_len; ++n) {
      re[n] = frame[n] * window[n];
    }
    featuredetail::fft(re, im);
    for (std::size_t k = 0; k < n_bins; ++k) {
      magnitude[k] = std::hypot(re[k], im[k]);
    }
    for (int m = 0; m < cfg.n_mels; ++m) {
      const MelFilter& filter = bank[static_cast<std::size_t>(m)];
      const double energy =
          filter.weights.empty()
              ? 0.0
              : kernels::dot(magnitude.data() + filter.first_bin,
                             filter.weights.data(), filter.weights.size());
      log_energies[static_cast<std::size_t>(m)] =
          std::log(std::max(energy, cfg.log_floor));
    }
    double* row = out.row(t);
    for (std::size_t k = 0; k < MfccMatrix::kCoeffs; ++k) {
      row[k] = kernels::dot(dct_rows.data() + k * cfg.n_mels,
                            log_energies.data(), log_energies.size());
    }
  }
  return out;
}

F0Contour extract_f0(const Waveform& w, const FeatureConfig& cfg) {
  cfg.validate();
  if (w.samples.empty()) {
    raise(ErrorCategory::validation, "extract_f0: empty waveform");
  }
  const std::size_t hop = samples_from_seconds(cfg.hop_s, w.sample_rate_hz);
  if (hop < 1) {
    raise(ErrorCategory::configuration, "hop resolves to zero samples");
  }
  const auto max_lag =
      static_cast<std::size_t>(std::ceil(w.sample_rate_hz / cfg.f0_min_hz));
  auto min_lag =
      static_cast<std::size_t>(std::floor(w.sample_rate_hz / cfg.f0_max_hz));
  min_lag = std::max<std::size_t>(min_lag, 2);
  if (min_lag + 2 > max_lag) {
    raise(ErrorCategory::configuration, "f0 search band too narrow at this sample rate");
  }

  const std::size_t window_len = 2 * max_lag;
  const std::size_t integ_len = max_lag;

  F0Contour contour;
  contour.hop_s = static_cast<double>(hop) / w.sample_rate_hz;
  if (w.samples.size() < window_len) {
    return contour;  // too short for one analysis window, not an error
  }
  const std::size_t n_frames = (w.samples.size() - window_len) / hop + 1;
  contour.f0_hz.assign(n_frames, 0.0);
  contour.voiced.assign(n_frames, 0);

  std::vector<double> cmnd(max_lag + 1);

  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* x = w.samples.data() + t * hop;

    const double rms =
        std::sqrt(kernels::sum_sq(x, window_len) / static_cast<double>(window_len));
    if (rms < kRmsSilenceGate) {
      continue;
    }

    // Difference function d(tau), normalized cumulatively into cmnd.
    cmnd[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= max_lag; ++tau) {
      const double d = kernels::l2_dist_sq(x, x + tau, integ_len);
      running += d;
      cmnd[tau] = running > 0.0 ? d * static_cast<double>(tau) / running : 1.0;
    }

    // First dip below the threshold, descended to its local minimum;
    // global band minimum otherwise.
    std::size_t tau_star = 0;
    for (std::size_t tau = min_lag; tau <= max_lag; ++tau) {
      if (cmnd[tau] < cfg.yin_threshold) {
        while (tau + 1 <= max_lag && cmnd[tau + 1] < cmnd[tau]) {
          ++tau;
        }
        tau_star = tau;
        break;
      }
    }
    if (tau_star == 0) {
      std::size_t best = min_lag;
      for (std::size_t tau = min_lag + 1; tau <= max_lag; ++tau) {
        if (cmnd[tau] < cmnd[best]) {
          best = tau;
        }
      }
      if (cmnd[best] > cfg.yin_threshold) {
        continue;  // unvoiced
      }
      tau_star = best;
    }

    // Parabolic interpolation of the minimum over (tau-1, tau, tau+1).
    double refined = static_cast<double>(tau_star);
    if (tau_star > 1 && tau_star < max_lag) {
      const double s0 = cmnd[tau_star - 1];
      const double s1 = cmnd[tau_star];
      const double s2 = cmnd[tau_star + 1];
      const double denom = 2.0 * (2.0 * s1 - s2 - s0);
      if (std::abs(denom) > 1e-12) {
        const double shift = (s2 - s0) / denom;
        if (std::abs(shift) <= 1.0) {
          refined += shift;
        }
      }
    }

    const double f0 = std::clamp(static_cast<double>(w.sample_rate_hz) / refined,
                                 cfg.f0_min_hz, cfg.f0_max_hz);
    contour.f0_hz[t] = f0;
    contour.voiced[t] = 1;
  }
  return contour;
}

}  // namespace prosoval
