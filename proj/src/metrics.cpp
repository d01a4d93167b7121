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

#include "prosoval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "prosoval/error.hpp"
#include "prosoval/kernels.hpp"

namespace prosoval {

namespace {

// 10/ln(10), the dB scaling of the Kubichek-style MCD form.
const double kMcdScale = 10.0 / std::numbers::ln10;

struct WordGrid {
  F0Segment nat;            // natural slice, reference grid
  F0Segment synth;          // synthesized slice resampled onto it
  double nat_duration_s = 0.0;
};

// Slices both sides of every word and resamples the synthesized slice
// onto the natural word's frame count. Words whose natural slice is
// empty keep an empty grid (they carry no frames).
std::vector<WordGrid> word_grids(const F0Contour& nat, const F0Contour& synth,
                                 const AlignmentPair& alignment) {
  std::vector<WordGrid> grids;
  grids.reserve(alignment.natural.size());
  for (std::size_t i = 0; i < alignment.natural.size(); ++i) {
    WordGrid grid;
    grid.nat = slice_word(nat, alignment.natural[i]);
    grid.nat_duration_s = alignment.natural[i].duration_s();
    const F0Segment synth_slice = slice_word(synth, alignment.synthesized[i]);
    if (!grid.nat.empty()) {
      if (synth_slice.empty()) {
        grid.synth.f0_hz.assign(grid.nat.size(), 0.0);
        grid.synth.voiced.assign(grid.nat.size(), 0);
      } else {
        grid.synth = resample_to_reference(synth_slice, grid.nat.size());
      }
    }
    grids.push_back(std::move(grid));
  }
  return grids;
}

}  // namespace

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  if (x.size() != y.size()) {
    raise(ErrorCategory::contract, "pearson: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    return std::nullopt;
  }
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double cov = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0.0 || var_y == 0.0) {
    return std::nullopt;
  }
  const double r = cov / (std::sqrt(var_x) * std::sqrt(var_y));
  return std::clamp(r, -1.0, 1.0);
}

std::optional<double> pearson_voiced(const F0Segment& a, const F0Segment& b) {
  if (a.size() != b.size()) {
    raise(ErrorCategory::contract, "pearson_voiced: length mismatch");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.voiced[i] && b.voiced[i]) {
      x.push_back(a.f0_hz[i]);
      y.push_back(b.f0_hz[i]);
    }
  }
  return pearson(x, y);
}

double mcd(const MfccMatrix& a, const MfccMatrix& b, const WarpPath& path) {
  if (path.pairs.empty()) {
    raise(ErrorCategory::contract, "mcd: empty warp path");
  }
  double total = 0.0;
  for (const auto& [i, j] : path.pairs) {
    if (i >= a.n_frames || j >= b.n_frames) {
      raise(ErrorCategory::contract, "mcd: path index out of range");
    }
    const double sq = kernels::l2_dist_sq(a.row(i), b.row(j), MfccMatrix::kCoeffs);
    total += kMcdScale * std::sqrt(2.0 * sq);
  }
  return total / static_cast<double>(path.pairs.size());
}

std::optional<double> ucorr(const F0Contour& nat,
                            const F0Contour& synth_aligned) {
  if (nat.n_frames() != synth_aligned.n_frames()) {
    raise(ErrorCategory::contract, "ucorr: contours differ in frame count");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t t = 0; t < nat.n_frames(); ++t) {
    if (nat.voiced[t] && synth_aligned.voiced[t]) {
      x.push_back(nat.f0_hz[t]);
      y.push_back(synth_aligned.f0_hz[t]);
    }
  }
  return pearson(x, y);
}

std::optional<double> ptcorr(const F0Contour& nat, const F0Contour& synth,
                             const AlignmentPair& alignment) {
  const auto grids = word_grids(nat, synth, alignment);

  double weight_total = 0.0;
  double weighted_sum = 0.0;
  bool any_defined = false;
  for (const auto& grid : grids) {
    if (grid.nat.empty()) {
      continue;
    }
    const auto r = pearson_voiced(grid.nat, grid.synth);
    if (!r.has_value()) {
      continue;
    }
    any_defined = true;
    weight_total += grid.nat_duration_s;
    weighted_sum += grid.nat_duration_s * *r;
  }
  if (!any_defined || weight_total <= 0.0) {
    return std::nullopt;
  }
  return weighted_sum / weight_total;
}

double partial_f0_variation(const F0Contour& c,
                            std::span<const WordSpan> spans) {
  if (spans.empty()) {
    raise(ErrorCategory::contract, "partial_f0_variation: no word spans");
  }
  double weight_total = 0.0;
  double weighted_sum = 0.0;
  for (const WordSpan& span : spans) {
    const F0Segment seg = slice_word(c, span);
    double lo = 0.0;
    double hi = 0.0;
    int voiced_count = 0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      if (!seg.voiced[i]) {
        continue;
      }
      if (voiced_count == 0) {
        lo = hi = seg.f0_hz[i];
      } else {
        lo = std::min(lo, seg.f0_hz[i]);
        hi = std::max(hi, seg.f0_hz[i]);
      }
      ++voiced_count;
    }
    const double range = voiced_count >= 2 ? hi - lo : 0.0;
    weight_total += span.duration_s();
    weighted_sum += span.duration_s() * range;
  }
  return weighted_sum / weight_total;
}

EvalReport evaluate_pair(const Waveform& natural, const Waveform& synthesized,
                         const AlignmentPair& alignment,
                         const FeatureConfig& cfg,
                         const std::string& utterance_id) {
  if (natural.sample_rate_hz != synthesized.sample_rate_hz) {
    raise(ErrorCategory::configuration,
          "sample rate mismatch: natural " +
              std::to_string(natural.sample_rate_hz) + " Hz vs synthesized " +
              std::to_string(synthesized.sample_rate_hz) + " Hz");
  }

  EvalReport report;
  report.utterance_id = utterance_id;
  report.n_words = static_cast<int>(alignment.natural.size());

  const MfccMatrix nat_mfcc = compute_mfcc(natural, cfg);
  const MfccMatrix synth_mfcc = compute_mfcc(synthesized, cfg);
  const WarpPath path = dtw_align(nat_mfcc, synth_mfcc);
  report.mcd_db = mcd(nat_mfcc, synth_mfcc, path);

  const F0Contour nat_f0 = extract_f0(natural, cfg);
  const F0Contour synth_f0 = extract_f0(synthesized, cfg);

  // UCorr runs on the concatenated word-resampled grid in natural time
  // order; PTCorr reuses the same per-word grids.
  const auto grids = word_grids(nat_f0, synth_f0, alignment);
  F0Segment nat_grid;
  F0Segment synth_grid;
  for (const auto& grid : grids) {
    nat_grid.f0_hz.insert(nat_grid.f0_hz.end(), grid.nat.f0_hz.begin(),
                          grid.nat.f0_hz.end());
    nat_grid.voiced.insert(nat_grid.voiced.end(), grid.nat.voiced.begin(),
                           grid.nat.voiced.end());
    synth_grid.f0_hz.insert(synth_grid.f0_hz.end(), grid.synth.f0_hz.begin(),
                            grid.synth.f0_hz.end());
    synth_grid.voiced.insert(synth_grid.voiced.end(), grid.synth.voiced.begin(),
                             grid.synth.voiced.end());
  }
  report.ucorr = pearson_voiced(nat_grid, synth_grid);

  int common = 0;
  for (std::size_t i = 0; i < nat_grid.size(); ++i) {
    if (nat_grid.voiced[i] && synth_grid.voiced[i]) {
      ++common;
    }
  }
  report.n_voiced_frames_common = common;

  report.ptcorr = ptcorr(nat_f0, synth_f0, alignment);
  int defined_words = 0;
  for (const auto& grid : grids) {
    if (!grid.nat.empty() && pearson_voiced(grid.nat, grid.synth).has_value()) {
      ++defined_words;
    }
  }
  report.ptcorr_words_excluded = report.n_words - defined_words;

  if (!alignment.synthesized.empty()) {
    report.partial_f0_variation_hz =
        partial_f0_variation(synth_f0, alignment.synthesized);
  }
  return report;
}

CorpusReport aggregate_corpus(std::span<const EvalReport> reports) {
  if (reports.empty()) {
    raise(ErrorCategory::contract, "aggregate_corpus: no reports");
  }
  CorpusReport corpus;
  corpus.n_utterances = static_cast<int>(reports.size());

  double ucorr_sum = 0.0;
  int ucorr_n = 0;
  double ptcorr_sum = 0.0;
  int ptcorr_n = 0;
  for (const EvalReport& r : reports) {
    corpus.mcd_db += r.mcd_db;
    corpus.partial_f0_variation_hz += r.partial_f0_variation_hz;
    corpus.n_words_mean += r.n_words;
    corpus.n_voiced_frames_common_mean += r.n_voiced_frames_common;
    if (r.ucorr.has_value()) {
      ucorr_sum += *r.ucorr;
      ++ucorr_n;
    }
    if (r.ptcorr.has_value()) {
      ptcorr_sum += *r.ptcorr;
      ++ptcorr_n;
    }
  }
  const auto n = static_cast<double>(reports.size());
  corpus.mcd_db /= n;
  corpus.partial_f0_variation_hz /= n;
  corpus.n_words_mean /= n;
  corpus.n_voiced_frames_common_mean /= n;
  if (ucorr_n > 0) {
    corpus.ucorr = ucorr_sum / ucorr_n;
  }
  if (ptcorr_n > 0) {
    corpus.ptcorr = ptcorr_sum / ptcorr_n;
  }
  corpus.ucorr_excluded = corpus.n_utterances - ucorr_n;
  corpus.ptcorr_excluded = corpus.n_utterances - ptcorr_n;
  return corpus;
}

}  // namespace prosoval
