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

#include "prosoval/align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "prosoval/error.hpp"
#include "prosoval/kernels.hpp"

namespace prosoval {

namespace {

constexpr double kBoundaryEps = 1e-9;

double local_cost(const MfccMatrix& a, const MfccMatrix& b, std::size_t i,
                  std::size_t j) {
  return std::sqrt(kernels::l2_dist_sq(a.row(i), b.row(j), MfccMatrix::kCoeffs));
}

std::vector<WordSpan> parse_span_list(const nlohmann::json& arr,
                                      const std::string& side,
                                      const std::string& origin) {
  if (!arr.is_array()) {
    raise(ErrorCategory::format,
          origin + ": \"" + side + "\" must be an array");
  }
  std::vector<WordSpan> spans;
  spans.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("word") ||
        !item.contains("start_s") || !item.contains("end_s") ||
        !item["word"].is_string() || !item["start_s"].is_number() ||
        !item["end_s"].is_number()) {
      raise(ErrorCategory::format,
            origin + ": each " + side +
                " entry needs string \"word\" and numeric \"start_s\"/\"end_s\"");
    }
    WordSpan span;
    span.word = item["word"].get<std::string>();
    span.start_s = item["start_s"].get<double>();
    span.end_s = item["end_s"].get<double>();
    if (span.start_s < 0.0 || !(span.start_s < span.end_s)) {
      raise(ErrorCategory::validation,
            origin + ": span for word \"" + span.word +
                "\" violates 0 <= start_s < end_s");
    }
    spans.push_back(std::move(span));
  }
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start_s < spans[i - 1].start_s) {
      raise(ErrorCategory::validation,
            origin + ": " + side + " spans not sorted by start_s");
    }
    if (spans[i].start_s < spans[i - 1].end_s - kBoundaryEps) {
      raise(ErrorCategory::validation,
            origin + ": overlapping " + side + " spans at word \"" +
                spans[i].word + "\"");
    }
  }
  return spans;
}

}  // namespace

WarpPath dtw_align(const MfccMatrix& a, const MfccMatrix& b) {
  const std::size_t n = a.n_frames;
  const std::size_t m = b.n_frames;
  if (n == 0 || m == 0) {
    raise(ErrorCategory::validation, "dtw_align: empty feature matrix");
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> table(n * m, kInf);
  auto cell = [&](std::size_t i, std::size_t j) -> double& {
    return table[i * m + j];
  };

  cell(0, 0) = local_cost(a, b, 0, 0);
  for (std::size_t i = 1; i < n; ++i) {
    cell(i, 0) = cell(i - 1, 0) + local_cost(a, b, i, 0);
  }
  for (std::size_t j = 1; j < m; ++j) {
    cell(0, j) = cell(0, j - 1) + local_cost(a, b, 0, j);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < m; ++j) {
      const double best =
          std::min({cell(i - 1, j - 1), cell(i - 1, j), cell(i, j - 1)});
      cell(i, j) = best + local_cost(a, b, i, j);
    }
  }

  WarpPath path;
  path.total_cost = cell(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      // Deterministic tie-break: diagonal, then up, then left.
      const double diag = cell(i - 1, j - 1);
      const double up = cell(i - 1, j);
      const double left = cell(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

AlignmentPair parse_alignment(const std::string& json_text,
                              const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorCategory::format, origin + ": alignment JSON parse error: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("natural") || !doc.contains("synthesized")) {
    raise(ErrorCategory::format,
          origin + ": alignment JSON needs \"natural\" and \"synthesized\" arrays");
  }

  AlignmentPair pair;
  if (doc.contains("utterance_id")) {
    if (!doc["utterance_id"].is_string()) {
      raise(ErrorCategory::format, origin + ": \"utterance_id\" must be a string");
    }
    pair.utterance_id = doc["utterance_id"].get<std::string>();
  }
  pair.natural = parse_span_list(doc["natural"], "natural", origin);
  pair.synthesized = parse_span_list(doc["synthesized"], "synthesized", origin);

  if (pair.natural.size() != pair.synthesized.size()) {
    raise(ErrorCategory::validation,
          origin + ": natural and synthesized word counts differ (" +
              std::to_string(pair.natural.size()) + " vs " +
              std::to_string(pair.synthesized.size()) + ")");
  }
  for (std::size_t i = 0; i < pair.natural.size(); ++i) {
    if (pair.natural[i].word != pair.synthesized[i].word) {
      raise(ErrorCategory::validation,
            origin + ": word mismatch at index " + std::to_string(i) + ": \"" +
                pair.natural[i].word + "\" vs \"" + pair.synthesized[i].word + "\"");
    }
  }
  return pair;
}

AlignmentPair load_alignment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCategory::io, "cannot open alignment file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_alignment(buf.str(), path.string());
}

F0Segment slice_word(const F0Contour& c, const WordSpan& w) {
  if (c.hop_s <= 0.0) {
    raise(ErrorCategory::contract, "slice_word: contour has no hop");
  }
  const std::size_t n = c.n_frames();
  const double extent_s = static_cast<double>(n) * c.hop_s;
  if (w.end_s > extent_s + c.hop_s + kBoundaryEps) {
    raise(ErrorCategory::validation,
          "word \"" + w.word + "\" ends " + std::to_string(w.end_s - extent_s) +
              " s past the contour extent (more than one hop)");
  }

  const auto first = static_cast<std::size_t>(
      std::max(0.0, std::ceil(w.start_s / c.hop_s - kBoundaryEps)));
  const auto end_excl = std::min(
      n, static_cast<std::size_t>(
             std::max(0.0, std::ceil(w.end_s / c.hop_s - kBoundaryEps))));

  F0Segment seg;
  for (std::size_t t = first; t < end_excl; ++t) {
    seg.f0_hz.push_back(c.f0_hz[t]);
    seg.voiced.push_back(c.voiced[t]);
  }
  return seg;
}

F0Segment resample_to_reference(const F0Segment& synth_seg,
                                std::size_t target_len) {
  if (synth_seg.empty()) {
    raise(ErrorCategory::contract, "resample_to_reference: empty source segment");
  }
  if (target_len < 1) {
    raise(ErrorCategory::contract, "resample_to_reference: target_len must be >= 1");
  }
  const std::size_t s = synth_seg.size();

  std::vector<std::size_t> voiced_idx;
  for (std::size_t i = 0; i < s; ++i) {
    if (synth_seg.voiced[i]) {
      voiced_idx.push_back(i);
    }
  }

  F0Segment out;
  out.f0_hz.assign(target_len, 0.0);
  out.voiced.assign(target_len, 0);
  if (voiced_idx.empty()) {
    return out;  // all-unvoiced source maps to all-unvoiced output
  }

  for (std::size_t k = 0; k < target_len; ++k) {
    const double pos =
        target_len == 1
            ? static_cast<double>(s - 1) / 2.0
            : static_cast<double>(k) * static_cast<double>(s - 1) /
                  static_cast<double>(target_len - 1);

    const auto nearest = static_cast<std::size_t>(std::lround(pos));
    out.voiced[k] = synth_seg.voiced[std::min(nearest, s - 1)];

    // Interpolate over the voiced grid. Interior unvoiced gaps are
    // bridged (value kept, flag cleared); outside the voiced hull the
    // value clamps to the hull edge when the frame is voiced and stays
    // 0 through leading/trailing unvoiced runs.
    const double front = static_cast<double>(voiced_idx.front());
    const double back = static_cast<double>(voiced_idx.back());
    double value;
    if (pos <= front) {
      value = synth_seg.f0_hz[voiced_idx.front()];
    } else if (pos >= back) {
      value = synth_seg.f0_hz[voiced_idx.back()];
    } else {
      const auto it = std::upper_bound(voiced_idx.begin(), voiced_idx.end(),
                                       static_cast<std::size_t>(pos));
      const std::size_t hi = *it;
      const std::size_t lo = *(it - 1);
      const double alpha =
          (pos - static_cast<double>(lo)) / static_cast<double>(hi - lo);
      value = synth_seg.f0_hz[lo] * (1.0 - alpha) + synth_seg.f0_hz[hi] * alpha;
    }
    if (!out.voiced[k] && (pos < front || pos > back)) {
      value = 0.0;
    }
    out.f0_hz[k] = value;
  }
  return out;
}

}  // namespace prosoval
