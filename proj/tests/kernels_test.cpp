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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rllow/estimator.hpp"
#include "rllow/kernels.hpp"

namespace rllow {
namespace {

using kernels::KernelTable;

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

// Relative agreement allowing for a different summation order.
void expect_close(double a, double b, double scale) {
  EXPECT_NEAR(a, b, 1e-12 * (1.0 + scale)) << a << " vs " << b;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (kernels::avx2_table() == nullptr || !kernels::cpu_supports_avx2()) {
      GTEST_SKIP() << "AVX2 variant not available on this machine";
    }
    simd_ = kernels::avx2_table();
  }
  const KernelTable& ref_ = kernels::scalar_table();
  const KernelTable* simd_ = nullptr;
};

TEST_F(KernelEquivalence, DotAndWeightedSumsMatchOnEveryTailLength) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 0; n < 40; ++n) {
    const auto a = random_vector(rng, n), b = random_vector(rng, n);
    std::vector<double> w = random_vector(rng, n);
    for (double& x : w) x = std::abs(x);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]) + w[i] * a[i] * a[i];
    expect_close(ref_.dot(a.data(), b.data(), n), simd_->dot(a.data(), b.data(), n), scale);
    expect_close(ref_.weighted_sum_squares(a.data(), w.data(), n),
                 simd_->weighted_sum_squares(a.data(), w.data(), n), scale);
  }
}

TEST_F(KernelEquivalence, AxpyAndClampAreExact) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 0; n < 23; ++n) {
    const auto x = random_vector(rng, n);
    auto y1 = random_vector(rng, n);
    auto y2 = y1;
    ref_.axpy(0.37, x.data(), y1.data(), n);
    simd_->axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1 + std::abs(y1[i])));
    auto c1 = x, c2 = x;
    ref_.clamp(c1.data(), n, -0.5, 0.25);
    simd_->clamp(c2.data(), n, -0.5, 0.25);
    EXPECT_EQ(c1, c2);
  }
}

TEST_F(KernelEquivalence, RowKernelsMatchAcrossShapes) {
  std::mt19937_64 rng(13);
  for (std::size_t cols : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u}) {
    for (std::size_t rows : {1u, 3u, 10u, 33u}) {
      const auto m = random_vector(rng, rows * cols);
      const auto v = random_vector(rng, cols);
      auto w = random_vector(rng, rows);
      for (double& x : w) x = std::abs(x);

      std::vector<double> d1(rows), d2(rows);
      ref_.row_dots(m.data(), rows, cols, v.data(), d1.data());
      simd_->row_dots(m.data(), rows, cols, v.data(), d2.data());
      for (std::size_t r = 0; r < rows; ++r) expect_close(d1[r], d2[r], static_cast<double>(cols));

      std::vector<double> g1(cols * cols, 0.0), g2(cols * cols, 0.0);
      ref_.weighted_gram(m.data(), rows, cols, w.data(), g1.data());
      simd_->weighted_gram(m.data(), rows, cols, w.data(), g2.data());
      for (std::size_t i = 0; i < g1.size(); ++i) expect_close(g1[i], g2[i], static_cast<double>(rows));

      std::vector<double> s1(cols, 0.0), s2(cols, 0.0);
      ref_.weighted_row_sum(m.data(), rows, cols, w.data(), s1.data());
      simd_->weighted_row_sum(m.data(), rows, cols, w.data(), s2.data());
      for (std::size_t i = 0; i < cols; ++i) expect_close(s1[i], s2[i], static_cast<double>(rows));
    }
  }
}

TEST_F(KernelEquivalence, EstimatorPipelineAgreesAcrossVariants) {
  Engine rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance v = testing::random_consistent_instance(rng);
    const PreferenceDataset data = sample_dataset(v, 200, 1000 + trial);
    kernels::set_active(kernels::Isa::kScalar);
    const EstimateReport a = rl_low(data, v.features, v.reward_bound, 5);
    kernels::set_active(kernels::Isa::kAvx2);
    const EstimateReport b = rl_low(data, v.features, v.reward_bound, 5);
    for (std::size_t i = 0; i < a.rhat.size(); ++i) EXPECT_NEAR(a.rhat[i], b.rhat[i], 1e-9);
  }
  kernels::set_active(kernels::Isa::kAvx2);
}

TEST(KernelDispatch, ScalarIsAlwaysAvailableAndSelectable) {
  const kernels::Isa before = kernels::active().isa;
  kernels::set_active(kernels::Isa::kScalar);
  EXPECT_EQ(kernels::active().isa, kernels::Isa::kScalar);
  EXPECT_EQ(kernels::isa_name(kernels::Isa::kScalar), "scalar");
  kernels::set_active(before);
}

TEST(KernelDispatch, RepeatedCallsAreBitwiseStable) {
  std::mt19937_64 rng(3);
  const auto a = random_vector(rng, 1001), b = random_vector(rng, 1001);
  const double first = kernels::dot(a, b);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(kernels::dot(a, b), first);
}

}  // namespace
}  // namespace rllow
