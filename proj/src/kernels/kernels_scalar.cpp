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

#include <algorithm>
#include <cstddef>

#include "rllow/kernels.hpp"

namespace rllow::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void row_dots_scalar(const double* rows, std::size_t num_rows,
                     std::size_t cols, const double* v, double* out) {
  for (std::size_t r = 0; r < num_rows; ++r) {
    out[r] = dot_scalar(rows + r * cols, v, cols);
  }
}

void weighted_gram_scalar(const double* rows, std::size_t num_rows,
                          std::size_t cols, const double* w, double* out) {
  for (std::size_t r = 0; r < num_rows; ++r) {
    const double* x = rows + r * cols;
    for (std::size_t a = 0; a < cols; ++a) {
      const double wa = w[r] * x[a];
      for (std::size_t b = 0; b < cols; ++b) out[a * cols + b] += wa * x[b];
    }
  }
}

void weighted_row_sum_scalar(const double* rows, std::size_t num_rows,
                             std::size_t cols, const double* w, double* out) {
  for (std::size_t r = 0; r < num_rows; ++r) {
    axpy_scalar(w[r], rows + r * cols, out, cols);
  }
}

double weighted_sum_squares_scalar(const double* x, const double* w,
                                   std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * x[i];
  return acc;
}

void clamp_scalar(double* x, std::size_t n, double lo, double hi) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::min(std::max(x[i], lo), hi);
}

}  // namespace

const KernelTable& make_scalar_table() {
  static const KernelTable table{
      Isa::kScalar,        "scalar",
      dot_scalar,          axpy_scalar,
      row_dots_scalar,     weighted_gram_scalar,
      weighted_row_sum_scalar, weighted_sum_squares_scalar,
      clamp_scalar,
  };
  return table;
}

}  // namespace rllow::kernels::detail
