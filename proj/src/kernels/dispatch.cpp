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

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "rllow/kernels.hpp"

namespace rllow::kernels {
namespace {

const KernelTable* select_default() {
  const char* forced = std::getenv("RLLOW_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") {
    return &scalar_table();
  }
  if (const KernelTable* avx2 = avx2_table();
      avx2 != nullptr && cpu_supports_avx2()) {
    return avx2;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{select_default()};
  return slot;
}

}  // namespace

const KernelTable& scalar_table() { return detail::make_scalar_table(); }

const KernelTable* avx2_table() {
#if defined(RLLOW_HAVE_AVX2)
  return detail::make_avx2_table();
#else
  return nullptr;
#endif
}

bool cpu_supports_avx2() {
#if defined(RLLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  const KernelTable* table = &scalar_table();
  if (isa == Isa::kAvx2) {
    const KernelTable* avx2 = avx2_table();
    if (avx2 != nullptr && cpu_supports_avx2()) table = avx2;
  }
  active_slot().store(table, std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void row_dots(std::span<const double> rows, std::size_t cols,
              std::span<const double> v, std::span<double> out) {
  assert(v.size() == cols && rows.size() == out.size() * cols);
  active().row_dots(rows.data(), out.size(), cols, v.data(), out.data());
}

void weighted_gram(std::span<const double> rows, std::size_t cols,
                   std::span<const double> w, std::span<double> out) {
  assert(out.size() == cols * cols && rows.size() == w.size() * cols);
  active().weighted_gram(rows.data(), w.size(), cols, w.data(), out.data());
}

void weighted_row_sum(std::span<const double> rows, std::size_t cols,
                      std::span<const double> w, std::span<double> out) {
  assert(out.size() == cols && rows.size() == w.size() * cols);
  active().weighted_row_sum(rows.data(), w.size(), cols, w.data(), out.data());
}

double weighted_sum_squares(std::span<const double> x,
                            std::span<const double> w) {
  assert(x.size() == w.size());
  return active().weighted_sum_squares(x.data(), w.data(), x.size());
}

void clamp(std::span<double> x, double lo, double hi) {
  active().clamp(x.data(), x.size(), lo, hi);
}

}  // namespace rllow::kernels
