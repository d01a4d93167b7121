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

#ifndef PROSOVAL_KERNELS_HPP
#define PROSOVAL_KERNELS_HPP

#include <cstddef>
#include <string_view>

// Arithmetic inner loops shared by the feature extractors and the DTW
// cost computation. Scalar reference implementations always exist; an
// AVX2 (x86-64) or NEON (aarch64) variant is selected once per process
// at startup when the CPU supports it. The PROSOVAL_SIMD environment
// variable (auto|scalar|avx2|neon) overrides the selection, which the
// equivalence tests use to compare backends.
namespace prosoval::kernels {

enum class Backend { scalar, avx2, neon };

// Backend chosen for this process.
Backend active_backend();

// True when the named backend was compiled in and the CPU supports it.
bool backend_available(Backend b);

// Re-points the dispatch table. Throws a configuration error for an
// unavailable backend. Not thread-safe against concurrent kernel calls;
// intended for tests and process startup.
void force_backend(Backend b);

std::string_view backend_name(Backend b);

// Inner product sum(a[i] * b[i]).
double dot(const double* a, const double* b, std::size_t n);

// sum(a[i]^2).
double sum_sq(const double* a, std::size_t n);

// Squared Euclidean distance sum((a[i] - b[i])^2).
double l2_dist_sq(const double* a, const double* b, std::size_t n);

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_sq_scalar(const double* a, std::size_t n);
double l2_dist_sq_scalar(const double* a, const double* b, std::size_t n);

#if defined(PROSOVAL_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_sq_avx2(const double* a, std::size_t n);
double l2_dist_sq_avx2(const double* a, const double* b, std::size_t n);
#endif

#if defined(PROSOVAL_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
double sum_sq_neon(const double* a, std::size_t n);
double l2_dist_sq_neon(const double* a, const double* b, std::size_t n);
#endif

}  // namespace detail

}  // namespace prosoval::kernels

#endif  // PROSOVAL_KERNELS_HPP
