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

#ifndef PROSOVAL_ALIGN_HPP
#define PROSOVAL_ALIGN_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "prosoval/features.hpp"

namespace prosoval {

// Monotone alignment path through a cost matrix; starts at (0,0), ends
// at (n-1, m-1), steps in {(1,0),(0,1),(1,1)}.
struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

struct WordSpan {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
};

// Word-level time spans for a (natural, synthesized) utterance pair,
// produced by an external forced aligner and ingested as JSON.
struct AlignmentPair {
  std::string utterance_id;
  std::vector<WordSpan> natural;
  std::vector<WordSpan> synthesized;
};

// F0 values with voicing flags for a slice of a contour. Unlike
// F0Contour, bridged (interpolated) values may be present on unvoiced
// frames after resampling.
struct F0Segment {
  std::vector<double> f0_hz;
  std::vector<std::uint8_t> voiced;

  std::size_t size() const { return f0_hz.size(); }
  bool empty() const { return f0_hz.empty(); }
};

// Classic DTW over the 13 coefficients with Euclidean local cost, unit
// step weights, full table, path backtracked from the end.
WarpPath dtw_align(const MfccMatrix& a, const MfccMatrix& b);

// Parses the alignment JSON schema:
// { "utterance_id": ..., "natural": [{"word","start_s","end_s"},...],
//   "synthesized": [...] }
// and validates the one-to-one word correspondence and span ordering.
AlignmentPair load_alignment(const std::filesystem::path& path);
AlignmentPair parse_alignment(const std::string& json_text,
                              const std::string& origin);

// Frames t with start_s <= t*hop < end_s. A span overshooting the
// contour end by at most one hop is clamped; more is a range error.
F0Segment slice_word(const F0Contour& c, const WordSpan& w);

// Linear resampling of a word-level segment onto target_len uniformly
// spaced positions. Interpolation runs over voiced frames only (gaps
// bridged between flanking voiced frames); an output frame is unvoiced
// iff its nearest source frame is unvoiced.
F0Segment resample_to_reference(const F0Segment& synth_seg,
                                std::size_t target_len);

}  // namespace prosoval

#endif  // PROSOVAL_ALIGN_HPP
