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

#ifndef PROSOVAL_METRICS_HPP
#define PROSOVAL_METRICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prosoval/align.hpp"
#include "prosoval/features.hpp"
#include "prosoval/signal.hpp"

namespace prosoval {

// Per-utterance metric values. Correlations are absent when degenerate
// (fewer than two usable frames or zero variance on either side).
struct EvalReport {
  std::string utterance_id;
  double mcd_db = 0.0;
  std::optional<double> ucorr;
  std::optional<double> ptcorr;
  double partial_f0_variation_hz = 0.0;
  int n_words = 0;
  int n_voiced_frames_common = 0;
  int ptcorr_words_excluded = 0;
};

// Per-field means over an evaluation set; undefined correlations are
// excluded per-field with the exclusion counts kept alongside.
struct CorpusReport {
  std::string method;
  double mcd_db = 0.0;
  std::optional<double> ucorr;
  std::optional<double> ptcorr;
  double partial_f0_variation_hz = 0.0;
  double n_words_mean = 0.0;
  double n_voiced_frames_common_mean = 0.0;
  int n_utterances = 0;
  int ucorr_excluded = 0;
  int ptcorr_excluded = 0;
};

// Sample Pearson correlation; nullopt when length < 2 or either side
// has zero variance. The result is clamped into [-1, 1].
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

// Pearson restricted to positions voiced in both segments.
std::optional<double> pearson_voiced(const F0Segment& a, const F0Segment& b);

// Mean over the warp path of
// (10/ln 10) * sqrt(2 * sum_d (a[i,d]-b[j,d])^2), in dB.
double mcd(const MfccMatrix& a, const MfccMatrix& b, const WarpPath& path);

// Utterance-level F0 correlation over frames voiced in both contours,
// which must share a frame grid.
std::optional<double> ucorr(const F0Contour& nat,
                            const F0Contour& synth_aligned);

// Word-level duration-weighted F0 correlation: per word, the
// synthesized slice is resampled onto the natural word's frame count
// and correlated over frames voiced in both; weights are natural word
// durations renormalized over words with a defined correlation.
std::optional<double> ptcorr(const F0Contour& nat, const F0Contour& synth,
                             const AlignmentPair& alignment);

// Duration-weighted word-level F0 range (max - min over voiced frames,
// 0 when a word has fewer than two voiced frames), in Hz.
double partial_f0_variation(const F0Contour& c,
                            std::span<const WordSpan> spans);

// Full pipeline for one (natural, synthesized) pair: MFCC + DTW for
// MCD; F0 extraction and word-wise resampling for UCorr, PTCorr and
// the synthesized-side partial F0 variation.
EvalReport evaluate_pair(const Waveform& natural, const Waveform& synthesized,
                         const AlignmentPair& alignment,
                         const FeatureConfig& cfg,
                         const std::string& utterance_id);

CorpusReport aggregate_corpus(std::span<const EvalReport> reports);

}  // namespace prosoval

#endif  // PROSOVAL_METRICS_HPP
