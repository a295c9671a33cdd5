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

// Dense double-precision kernels used by the estimator hot loops.
//
// Every kernel has a portable scalar reference implementation and, on x86-64
// builds, an AVX2+FMA variant. The variant is chosen once per process from
// CPUID; setting RLLOW_KERNELS=scalar in the environment forces the reference
// path. Variants differ only in floating-point summation order, so results
// agree to rounding but not bitwise. Within one variant every kernel uses a
// fixed accumulation order, so repeated calls are bitwise reproducible.
//
// Row-major "rows" arguments hold `num_rows` contiguous records of `cols`
// doubles each.

#ifndef RLLOW_KERNELS_HPP_
#define RLLOW_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

namespace rllow::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = <row r, v>
  void (*row_dots)(const double* rows, std::size_t num_rows, std::size_t cols,
                   const double* v, double* out);
  // out (cols x cols, row-major) += sum_r w[r] * row_r * row_r^T
  void (*weighted_gram)(const double* rows, std::size_t num_rows,
                        std::size_t cols, const double* w, double* out);
  // out[c] += sum_r w[r] * row_r[c]
  void (*weighted_row_sum)(const double* rows, std::size_t num_rows,
                           std::size_t cols, const double* w, double* out);
  // sum_i w[i] * x[i]^2
  double (*weighted_sum_squares)(const double* x, const double* w,
                                 std::size_t n);
  void (*clamp)(double* x, std::size_t n, double lo, double hi);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

// The table selected for this process.
const KernelTable& active();

// Test hook: replaces the process-wide selection. Not thread-safe against
// concurrent kernel calls.
void set_active(Isa isa);

std::string_view isa_name(Isa isa);

// Span front-ends over active().
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void row_dots(std::span<const double> rows, std::size_t cols,
              std::span<const double> v, std::span<double> out);
void weighted_gram(std::span<const double> rows, std::size_t cols,
                   std::span<const double> w, std::span<double> out);
void weighted_row_sum(std::span<const double> rows, std::size_t cols,
                      std::span<const double> w, std::span<double> out);
double weighted_sum_squares(std::span<const double> x,
                            std::span<const double> w);
void clamp(std::span<double> x, double lo, double hi);

namespace detail {
const KernelTable& make_scalar_table();
const KernelTable* make_avx2_table();
}  // namespace detail

}  // namespace rllow::kernels

#endif  // RLLOW_KERNELS_HPP_
