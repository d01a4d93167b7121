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

#ifndef PROSOVAL_FEATURES_HPP
#define PROSOVAL_FEATURES_HPP

#include <cstddef>
#include <vector>

#include "prosoval/signal.hpp"

namespace prosoval {

struct FeatureConfig {
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  int n_fft = 1024;
  int n_mels = 40;
  double mel_fmin_hz = 0.0;
  double mel_fmax_hz = 0.0;  // 0 means sample_rate / 2
  double log_floor = 1e-10;
  double f0_min_hz = 60.0;
  double f0_max_hz = 400.0;
  double yin_threshold = 0.15;

  // Throws a configuration error on out-of-range values.
  void validate() const;
};

// Mel cepstral coefficients c1..c13 per frame (c0, the overall energy,
// is dropped). Row-major, 13 columns.
struct MfccMatrix {
  static constexpr std::size_t kCoeffs = 13;

  std::vector<double> coeffs;  // n_frames * kCoeffs
  std::size_t n_frames = 0;
  double hop_s = 0.0;

  const double* row(std::size_t t) const { return coeffs.data() + t * kCoeffs; }
  double* row(std::size_t t) { return coeffs.data() + t * kCoeffs; }
};

// Per-frame fundamental frequency on a fixed hop grid. f0_hz[t] > 0
// exactly when voiced[t] is set; unvoiced frames carry 0.
struct F0Contour {
  std::vector<double> f0_hz;
  std::vector<std::uint8_t> voiced;
  double hop_s = 0.0;

  std::size_t n_frames() const { return f0_hz.size(); }
  double duration_s() const { return static_cast<double>(n_frames()) * hop_s; }
};

// Hann window -> magnitude spectrum (n_fft DFT) -> triangular mel
// filterbank -> log(max(E, log_floor)) -> orthonormal DCT-II, keeping
// coefficients 1..13.
MfccMatrix compute_mfcc(const Waveform& w, const FeatureConfig& cfg);

// YIN estimator: cumulative-mean-normalized difference per frame over
// the lag band [sr/f0_max, sr/f0_min], first dip below yin_threshold
// (global minimum otherwise), parabolic interpolation around the chosen
// lag. A frame is unvoiced when the band minimum of the normalized
// difference exceeds yin_threshold or the frame RMS is below 1e-4.
F0Contour extract_f0(const Waveform& w, const FeatureConfig& cfg);

namespace featuredetail {

// In-place iterative radix-2 FFT over interleaved complex values.
// n must be a power of two.
void fft(std::vector<double>& re, std::vector<double>& im);

// YIN analysis window in samples: twice the largest searched lag, so
// the difference function integrates one full period at f0_min.
std::size_t yin_window(int sample_rate_hz, double f0_min_hz);

}  // namespace featuredetail

}  // namespace prosoval

#endif  // PROSOVAL_FEATURES_HPP
