//
// Copyright 2026 The rllow Authors
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
//

// Compiled with -mavx2 -mfma. Nothing in this file may run before
// cpu_supports_avx2() has returned true.

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

#include "rllow/kernels.hpp"

namespace rllow::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void row_dots_avx2(const double* rows, std::size_t num_rows, std::size_t cols,
                   const double* v, double* out) {
  if (cols == 4) {
    // Span dimensions of 4 are common enough to deserve a one-load path.
    const __m256d vv = _mm256_loadu_pd(v);
    for (std::size_t r = 0; r < num_rows; ++r) {
      out[r] = hsum(_mm256_mul_pd(_mm256_loadu_pd(rows + r * 4), vv));
    }
    return;
  }
  for (std::size_t r = 0; r < num_rows; ++r) {
    out[r] = dot_avx2(rows + r * cols, v, cols);
  }
}

void weighted_gram_avx2(const double* rows, std::size_t num_rows,
                        std::size_t cols, const double* w, double* out) {
  for (std::size_t r = 0; r < num_rows; ++r) {
    const double* x = rows + r * cols;
    for (std::size_t a = 0; a < cols; ++a) {
      axpy_avx2(w[r] * x[a], x, out + a * cols, cols);
    }
  }
}

void weighted_row_sum_avx2(const double* rows, std::size_t num_rows,
                           std::size_t cols, const double* w, double* out) {
  for (std::size_t r = 0; r < num_rows; ++r) {
    axpy_avx2(w[r], rows + r * cols, out, cols);
  }
}

double weighted_sum_squares_avx2(const double* x, const double* w,
                                 std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), xv), xv, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += w[i] * x[i] * x[i];
  return total;
}

void clamp_avx2(double* x, std::size_t n, double lo, double hi) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(x + i, _mm256_min_pd(_mm256_max_pd(v, vlo), vhi));
  }
  for (; i < n; ++i) x[i] = std::min(std::max(x[i], lo), hi);
}

}  // namespace

const KernelTable* make_avx2_table() {
  static const KernelTable table{
      Isa::kAvx2,        "avx2",
      dot_avx2,          axpy_avx2,
      row_dots_avx2,     weighted_gram_avx2,
      weighted_row_sum_avx2, weighted_sum_squares_avx2,
      clamp_avx2,
  };
  return &table;
}

}  // namespace rllow::kernels::detail
