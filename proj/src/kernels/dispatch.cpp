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

#include <cstdlib>
#include <cstring>
#include <string>

#include "prosoval/error.hpp"
#include "prosoval/log.hpp"

namespace prosoval::kernels {

namespace {

struct Table {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  double (*l2_dist_sq)(const double*, const double*, std::size_t);
};

constexpr Table kScalarTable{Backend::scalar, detail::dot_scalar,
                             detail::sum_sq_scalar, detail::l2_dist_sq_scalar};

#if defined(PROSOVAL_HAVE_AVX2)
constexpr Table kAvx2Table{Backend::avx2, detail::dot_avx2,
                           detail::sum_sq_avx2, detail::l2_dist_sq_avx2};
#endif
#if defined(PROSOVAL_HAVE_NEON)
constexpr Table kNeonTable{Backend::neon, detail::dot_neon,
                           detail::sum_sq_neon, detail::l2_dist_sq_neon};
#endif

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(PROSOVAL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(PROSOVAL_HAVE_NEON)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

const Table* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalarTable;
    case Backend::avx2:
#if defined(PROSOVAL_HAVE_AVX2)
      return &kAvx2Table;
#else
      return nullptr;
#endif
    case Backend::neon:
#if defined(PROSOVAL_HAVE_NEON)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Table* select_startup_table() {
  const char* env = std::getenv("PROSOVAL_SIMD");
  if (env != nullptr && std::strlen(env) > 0 &&
      std::strcmp(env, "auto") != 0) {
    Backend want;
    if (std::strcmp(env, "scalar") == 0) {
      want = Backend::scalar;
    } else if (std::strcmp(env, "avx2") == 0) {
      want = Backend::avx2;
    } else if (std::strcmp(env, "neon") == 0) {
      want = Backend::neon;
    } else {
      log::warn("PROSOVAL_SIMD=%s not recognized, using auto selection", env);
      env = nullptr;
      want = Backend::scalar;
    }
    if (env != nullptr) {
      if (cpu_supports(want)) {
        return table_for(want);
      }
      log::warn("PROSOVAL_SIMD=%s unavailable on this host, falling back", env);
    }
  }
  if (cpu_supports(Backend::avx2)) {
    return table_for(Backend::avx2);
  }
  if (cpu_supports(Backend::neon)) {
    return table_for(Backend::neon);
  }
  return &kScalarTable;
}

// Resolved before main() so worker threads never race the selection.
const Table* g_table = select_startup_table();

}  // namespace

Backend active_backend() { return g_table->backend; }

bool backend_available(Backend b) { return cpu_supports(b); }

void force_backend(Backend b) {
  if (!cpu_supports(b)) {
    raise(ErrorCategory::configuration,
          "kernel backend " + std::string(backend_name(b)) +
              " is not available on this host");
  }
  g_table = table_for(b);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
  return g_table->dot(a, b, n);
}

double sum_sq(const double* a, std::size_t n) { return g_table->sum_sq(a, n); }

double l2_dist_sq(const double* a, const double* b, std::size_t n) {
  return g_table->l2_dist_sq(a, b, n);
}

}  // namespace prosoval::kernels
