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

#include "prosoval/kernels.hpp"

#include <random>
#include <vector>

#include <doctest.h>

#include "prosoval/error.hpp"

using namespace prosoval;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) {
    x = dist(rng);
  }
  return v;
}

// FMA and lane-wise accumulation reorder the sums, so SIMD results can
// differ from scalar in the last bits; bound the relative error instead
// of requiring equality.
void check_close(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  CHECK(std::abs(a - b) <= 1e-12 * scale);
}

}  // namespace

TEST_CASE("scalar kernels match straightforward loops") {
  std::mt19937 rng(7);
  const auto a = random_vec(rng, 37);
  const auto b = random_vec(rng, 37);
  double dot = 0.0;
  double ssq = 0.0;
  double dsq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    ssq += a[i] * a[i];
    const double d = a[i] - b[i];
    dsq += d * d;
  }
  CHECK(kernels::detail::dot_scalar(a.data(), b.data(), a.size()) == doctest::Approx(dot));
  CHECK(kernels::detail::sum_sq_scalar(a.data(), a.size()) == doctest::Approx(ssq));
  CHECK(kernels::detail::l2_dist_sq_scalar(a.data(), b.data(), a.size()) ==
        doctest::Approx(dsq));
}

TEST_CASE("SIMD backend agrees with the scalar reference") {
  const kernels::Backend original = kernels::active_backend();
  kernels::Backend simd;
  if (kernels::backend_available(kernels::Backend::avx2)) {
    simd = kernels::Backend::avx2;
  } else if (kernels::backend_available(kernels::Backend::neon)) {
    simd = kernels::Backend::neon;
  } else {
    return;  // scalar-only host; the dispatch defaults already cover it
  }

  std::mt19937 rng(11);
  // Odd sizes exercise every remainder path.
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 12, 13, 15, 16, 17, 31, 32,
                        33, 63, 64, 65, 100, 1000, 1001}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);

    kernels::force_backend(kernels::Backend::scalar);
    const double dot_ref = kernels::dot(a.data(), b.data(), n);
    const double ssq_ref = kernels::sum_sq(a.data(), n);
    const double dsq_ref = kernels::l2_dist_sq(a.data(), b.data(), n);

    kernels::force_backend(simd);
    check_close(kernels::dot(a.data(), b.data(), n), dot_ref);
    check_close(kernels::sum_sq(a.data(), n), ssq_ref);
    check_close(kernels::l2_dist_sq(a.data(), b.data(), n), dsq_ref);
  }
  kernels::force_backend(original);
}

TEST_CASE("dot of a vector with itself is its squared norm") {
  std::mt19937 rng(23);
  for (int round = 0; round < 20; ++round) {
    const auto a = random_vec(rng, 1 + static_cast<std::size_t>(rng() % 200));
    check_close(kernels::dot(a.data(), a.data(), a.size()),
                kernels::sum_sq(a.data(), a.size()));
    CHECK(kernels::l2_dist_sq(a.data(), a.data(), a.size()) == 0.0);
  }
}

TEST_CASE("forcing an unavailable backend is a configuration error") {
  kernels::Backend missing;
  if (!kernels::backend_available(kernels::Backend::neon)) {
    missing = kernels::Backend::neon;
  } else if (!kernels::backend_available(kernels::Backend::avx2)) {
    missing = kernels::Backend::avx2;
  } else {
    return;
  }
  CHECK_THROWS_AS(kernels::force_backend(missing), Error);
}
