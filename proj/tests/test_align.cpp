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

#include <cmath>
#include <random>

#include <doctest.h>

#include "prosoval/error.hpp"
#include "prosoval/kernels.hpp"
#include "testutil.hpp"

using namespace prosoval;

namespace {

MfccMatrix random_mfcc(std::mt19937& rng, std::size_t n_frames) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  MfccMatrix m;
  m.n_frames = n_frames;
  m.hop_s = 0.01;
  m.coeffs.resize(n_frames * MfccMatrix::kCoeffs);
  for (double& v : m.coeffs) {
    v = dist(rng);
  }
  return m;
}

MfccMatrix mfcc_from_rows(const std::vector<std::vector<double>>& rows) {
  MfccMatrix m;
  m.n_frames = rows.size();
  m.hop_s = 0.01;
  for (const auto& row : rows) {
    REQUIRE(row.size() == MfccMatrix::kCoeffs);
    m.coeffs.insert(m.coeffs.end(), row.begin(), row.end());
  }
  return m;
}

double cost(const MfccMatrix& a, const MfccMatrix& b, std::size_t i,
            std::size_t j) {
  return std::sqrt(
      kernels::l2_dist_sq(a.row(i), b.row(j), MfccMatrix::kCoeffs));
}

// Exhaustive minimum over every monotone path with steps
// {(1,0),(0,1),(1,1)}. Feasible up to about 8x8.
double brute_force_dtw(const MfccMatrix& a, const MfccMatrix& b) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = a.n_frames;
  const std::size_t m = b.n_frames;

  struct Frame {
    std::size_t i, j;
    double acc;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, cost(a, b, 0, 0)});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.i == n - 1 && f.j == m - 1) {
      best = std::min(best, f.acc);
      continue;
    }
    if (f.i + 1 < n && f.j + 1 < m) {
      stack.push_back({f.i + 1, f.j + 1, f.acc + cost(a, b, f.i + 1, f.j + 1)});
    }
    if (f.i + 1 < n) {
      stack.push_back({f.i + 1, f.j, f.acc + cost(a, b, f.i + 1, f.j)});
    }
    if (f.j + 1 < m) {
      stack.push_back({f.i, f.j + 1, f.acc + cost(a, b, f.i, f.j + 1)});
    }
  }
  return best;
}

std::vector<double> coeff_row(double value) {
  std::vector<double> row(MfccMatrix::kCoeffs, 0.0);
  row[0] = value;
  return row;
}

F0Segment segment(const std::vector<double>& values,
                  const std::vector<int>& voiced) {
  F0Segment seg;
  seg.f0_hz = values;
  for (int v : voiced) {
    seg.voiced.push_back(static_cast<std::uint8_t>(v));
  }
  return seg;
}

}  // namespace

TEST_CASE("identical inputs align along the diagonal at zero cost") {
  std::mt19937 rng(2);
  const MfccMatrix a = random_mfcc(rng, 10);
  const WarpPath path = dtw_align(a, a);
  CHECK(path.total_cost == 0.0);
  REQUIRE(path.pairs.size() == 10);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(path.pairs[t].first == t);
    CHECK(path.pairs[t].second == t);
  }
}

TEST_CASE("repetitions are absorbed at zero cost") {
  const auto x = coeff_row(1.0);
  const auto y = coeff_row(-1.0);
  const MfccMatrix a = mfcc_from_rows({x, y});
  const MfccMatrix b = mfcc_from_rows({x, x, y});
  const WarpPath path = dtw_align(a, b);
  CHECK(path.total_cost == 0.0);
  REQUIRE(path.pairs.size() == 3);
  CHECK(path.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(path.pairs[1] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(path.pairs[2] == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("dp cost equals exhaustive path enumeration") {
  std::mt19937 rng(77);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 1 + rng() % 8;
    const std::size_t m = 1 + rng() % 8;
    const MfccMatrix a = random_mfcc(rng, n);
    const MfccMatrix b = random_mfcc(rng, m);
    const WarpPath path = dtw_align(a, b);
    CHECK(path.total_cost == brute_force_dtw(a, b));
  }
}

TEST_CASE("dtw path structure invariants") {
  std::mt19937 rng(123);
  for (int round = 0; round < 20; ++round) {
    const MfccMatrix a = random_mfcc(rng, 2 + rng() % 12);
    const MfccMatrix b = random_mfcc(rng, 2 + rng() % 12);
    const WarpPath path = dtw_align(a, b);

    REQUIRE(!path.pairs.empty());
    CHECK(path.pairs.front() == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(path.pairs.back() ==
          std::pair<std::size_t, std::size_t>{a.n_frames - 1, b.n_frames - 1});
    for (std::size_t k = 1; k < path.pairs.size(); ++k) {
      const auto di = path.pairs[k].first - path.pairs[k - 1].first;
      const auto dj = path.pairs[k].second - path.pairs[k - 1].second;
      CHECK(di <= 1);
      CHECK(dj <= 1);
      CHECK(di + dj >= 1);
    }

    // Path cost re-derives from local costs.
    double acc = 0.0;
    for (const auto& [i, j] : path.pairs) {
      acc += cost(a, b, i, j);
    }
    CHECK(path.total_cost == doctest::Approx(acc).epsilon(1e-12));

    // Symmetric step set makes the optimal cost symmetric.
    const WarpPath reverse = dtw_align(b, a);
    CHECK(path.total_cost == doctest::Approx(reverse.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("dtw cost is bounded by the diagonal path on equal lengths") {
  std::mt19937 rng(9);
  for (int round = 0; round < 15; ++round) {
    const std::size_t n = 2 + rng() % 10;
    const MfccMatrix a = random_mfcc(rng, n);
    const MfccMatrix b = random_mfcc(rng, n);
    double diagonal = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      diagonal += cost(a, b, t, t);
    }
    const WarpPath path = dtw_align(a, b);
    CHECK(path.total_cost >= 0.0);
    CHECK(path.total_cost <= diagonal + 1e-12);
  }
}

TEST_CASE("empty inputs are an alignment error") {
  std::mt19937 rng(4);
  const MfccMatrix a = random_mfcc(rng, 3);
  MfccMatrix empty;
  CHECK_THROWS_AS(dtw_align(a, empty), Error);
  CHECK_THROWS_AS(dtw_align(empty, a), Error);
}

TEST_CASE("alignment json parsing") {
  SUBCASE("two matching words") {
    const AlignmentPair pair = parse_alignment(
        R"({"utterance_id":"u1",
            "natural":[{"word":"the","start_s":0.0,"end_s":0.4},
                        {"word":"cat","start_s":0.5,"end_s":0.9}],
            "synthesized":[{"word":"the","start_s":0.0,"end_s":0.3},
                            {"word":"cat","start_s":0.4,"end_s":1.0}]})",
        "test");
    CHECK(pair.utterance_id == "u1");
    REQUIRE(pair.natural.size() == 2);
    REQUIRE(pair.synthesized.size() == 2);
    CHECK(pair.natural[1].word == "cat");
  }

  SUBCASE("word mismatch") {
    try {
      parse_alignment(
          R"({"natural":[{"word":"the","start_s":0,"end_s":1}],
              "synthesized":[{"word":"a","start_s":0,"end_s":1}]})",
          "test");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::validation);
      CHECK(std::string(e.what()).find("mismatch") != std::string::npos);
    }
  }

  SUBCASE("overlapping spans") {
    try {
      parse_alignment(
          R"({"natural":[{"word":"a","start_s":0.0,"end_s":0.5},
                          {"word":"b","start_s":0.4,"end_s":0.9}],
              "synthesized":[{"word":"a","start_s":0.0,"end_s":0.5},
                              {"word":"b","start_s":0.5,"end_s":0.9}]})",
          "test");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::validation);
    }
  }

  SUBCASE("malformed json") {
    try {
      parse_alignment("{not json", "test");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::format);
    }
  }

  SUBCASE("length mismatch between sides") {
    CHECK_THROWS_AS(parse_alignment(
                        R"({"natural":[{"word":"a","start_s":0,"end_s":1}],
                            "synthesized":[]})",
                        "test"),
                    Error);
  }
}

TEST_CASE("slice_word boundary rules") {
  F0Contour c = testutil::contour_from_values(
      {100, 110, 120, 130, 140, 150, 160, 170, 180, 190}, 0.01);

  SUBCASE("frames with start <= t*hop < end") {
    const F0Segment seg = slice_word(c, {"w", 0.02, 0.05});
    REQUIRE(seg.size() == 3);
    CHECK(seg.f0_hz[0] == 120);
    CHECK(seg.f0_hz[1] == 130);
    CHECK(seg.f0_hz[2] == 140);
  }

  SUBCASE("narrow span can be empty") {
    const F0Segment seg = slice_word(c, {"w", 0.021, 0.029});
    CHECK(seg.empty());
  }

  SUBCASE("span overshooting by at most one hop clamps") {
    const F0Segment seg = slice_word(c, {"w", 0.08, 0.109});
    REQUIRE(seg.size() == 2);
    CHECK(seg.f0_hz[1] == 190);
  }

  SUBCASE("span overshooting by more than one hop is a range error") {
    try {
      slice_word(c, {"w", 0.08, 0.12});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::validation);
    }
  }

  SUBCASE("voicing flags ride along") {
    c.voiced[3] = 0;
    c.f0_hz[3] = 0.0;
    const F0Segment seg = slice_word(c, {"w", 0.02, 0.05});
    CHECK(seg.voiced[0] == 1);
    CHECK(seg.voiced[1] == 0);
  }
}

TEST_CASE("resample_to_reference") {
  SUBCASE("two voiced frames to three") {
    const F0Segment out =
        resample_to_reference(segment({100, 200}, {1, 1}), 3);
    REQUIRE(out.size() == 3);
    CHECK(out.f0_hz[0] == doctest::Approx(100.0));
    CHECK(out.f0_hz[1] == doctest::Approx(150.0));
    CHECK(out.f0_hz[2] == doctest::Approx(200.0));
    CHECK(out.voiced == std::vector<std::uint8_t>{1, 1, 1});
  }

  SUBCASE("constant input stays constant") {
    const F0Segment out =
        resample_to_reference(segment({150, 150, 150}, {1, 1, 1}), 7);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.f0_hz[i] == doctest::Approx(150.0));
      CHECK(out.voiced[i] == 1);
    }
  }

  SUBCASE("unvoiced gap bridges linearly but stays unvoiced") {
    const F0Segment out =
        resample_to_reference(segment({100, 0, 300}, {1, 0, 1}), 3);
    REQUIRE(out.size() == 3);
    CHECK(out.f0_hz[0] == doctest::Approx(100.0));
    CHECK(out.f0_hz[1] == doctest::Approx(200.0));
    CHECK(out.f0_hz[2] == doctest::Approx(300.0));
    CHECK(out.voiced == std::vector<std::uint8_t>{1, 0, 1});
  }

  SUBCASE("identity when target length matches a fully voiced source") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(80.0, 350.0);
    for (int round = 0; round < 10; ++round) {
      std::vector<double> values(2 + rng() % 30);
      for (double& v : values) {
        v = dist(rng);
      }
      const F0Segment src = segment(values, std::vector<int>(values.size(), 1));
      const F0Segment out = resample_to_reference(src, values.size());
      REQUIRE(out.size() == values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(out.f0_hz[i] == doctest::Approx(values[i]).epsilon(1e-12));
        CHECK(out.voiced[i] == 1);
      }
    }
  }

  SUBCASE("all-unvoiced source maps to all-unvoiced output") {
    const F0Segment out =
        resample_to_reference(segment({0, 0, 0}, {0, 0, 0}), 5);
    REQUIRE(out.size() == 5);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.voiced[i] == 0);
      CHECK(out.f0_hz[i] == 0.0);
    }
  }

  SUBCASE("leading and trailing unvoiced runs stay unvoiced") {
    const F0Segment out = resample_to_reference(
        segment({0, 0, 200, 240, 0}, {0, 0, 1, 1, 0}), 5);
    REQUIRE(out.size() == 5);
    CHECK(out.voiced[0] == 0);
    CHECK(out.f0_hz[0] == 0.0);
    CHECK(out.voiced[2] == 1);
    CHECK(out.voiced[4] == 0);
    CHECK(out.f0_hz[4] == 0.0);
  }

  SUBCASE("empty source violates the contract") {
    CHECK_THROWS_AS(resample_to_reference(F0Segment{}, 3), Error);
  }
}
