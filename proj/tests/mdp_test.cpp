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
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rllow/mdp.hpp"

namespace rllow {
namespace {

using testing::t1;
using testing::t2;

TransitionKernel kernel_from_rows(int s, int a, std::vector<double> probs) {
  return validate_kernel(TransitionKernel{s, a, std::move(probs)});
}

// 0 -> 1 -> 0 regardless of the action.
TransitionKernel two_cycle(int a) {
  std::vector<double> p;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < a; ++i) {
      p.push_back(k == 0 ? 0.0 : 1.0);
      p.push_back(k == 0 ? 1.0 : 0.0);
    }
  }
  return kernel_from_rows(2, a, p);
}

TEST(Kernel, Validation) {
  EXPECT_NO_THROW(two_cycle(2));
  EXPECT_THROW(kernel_from_rows(1, 1, {0.5}), ValidationError);
  EXPECT_THROW(kernel_from_rows(1, 2, {1.0}), ValidationError);
  EXPECT_THROW(kernel_from_rows(2, 1, {1.5, -0.5, 0.0, 1.0}), ValidationError);
  EXPECT_NO_THROW(kernel_from_rows(1, 1, {1.0 + 5e-13}));
}

TEST(Stationary, StateIndependentRowsGiveRho) {
  const std::vector<double> rho = {0.2, 0.3, 0.5};
  const TransitionKernel p = state_independent_kernel(2, rho);
  for (const Policy& pi : {Policy{0, 0, 0}, Policy{1, 0, 1}}) {
    const auto d = stationary_distribution(p, pi, rho);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(d[k], rho[k], 1e-10);
  }
}

TEST(Stationary, SelfLoopsGiveRho) {
  const std::vector<double> rho = {0.1, 0.9};
  const auto d = stationary_distribution(self_loop_kernel(2, 3), {2, 1}, rho);
  EXPECT_NEAR(d[0], 0.1, 1e-12);
  EXPECT_NEAR(d[1], 0.9, 1e-12);
}

TEST(Stationary, TwoCycleIsUniformForAnyStart) {
  for (const std::vector<double>& rho : {std::vector<double>{1.0, 0.0}, {0.3, 0.7}}) {
    const auto d = stationary_distribution(two_cycle(1), {0, 0}, rho);
    EXPECT_NEAR(d[0], 0.5, 1e-9);
    EXPECT_NEAR(d[1], 0.5, 1e-9);
    const auto oracle = testing::cesaro_average(two_cycle(1), {0, 0}, rho, 100000);
    EXPECT_NEAR(d[0], oracle[0], 1e-4);
  }
}

TEST(Stationary, MatchesTimeAverageOnRandomChains) {
  Engine rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int s = 2 + trial % 3;
    const TransitionKernel p = testing::random_kernel(rng, s, 2);
    const std::vector<double> rho = testing::random_simplex(rng, s);
    const Policy pi(static_cast<std::size_t>(s), trial % 2);
    const auto d = stationary_distribution(p, pi, rho);
    const auto oracle = testing::cesaro_average(p, pi, rho, 200000);
    double total = 0.0;
    for (int k = 0; k < s; ++k) {
      EXPECT_GE(d[k], 0.0);
      EXPECT_NEAR(d[k], oracle[k], 1e-4) << "trial " << trial;
      total += d[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Stationary, RejectsBadPolicies) {
  const TransitionKernel p = self_loop_kernel(2, 2);
  EXPECT_THROW(stationary_distribution(p, {0}, std::vector<double>{0.5, 0.5}), ValidationError);
  EXPECT_THROW(stationary_distribution(p, {0, 2}, std::vector<double>{0.5, 0.5}), ValidationError);
  EXPECT_THROW(stationary_distribution(p, {0, 0}, std::vector<double>{1.0}), ValidationError);
}

TEST(PolicySearch, SingleStateIsArgmax) {
  const std::vector<double> r = {0.3, 0.9, -0.2};
  const std::vector<double> rho = {1.0};
  const TransitionKernel p = state_independent_kernel(3, rho);
  for (SearchMode m : {SearchMode::kEnumerate, SearchMode::kIterate}) {
    EXPECT_EQ(mdp_policy_search(r, p, rho, m), Policy{1});
  }
}

TEST(PolicySearch, StateIndependentKernelIsPerStateArgmax) {
  const std::vector<double> rho = {0.5, 0.25, 0.25};
  const std::vector<double> r = {0.1, 0.4, 0.2, /**/ 0.9, 0.0, 0.5, /**/ -1.0, -2.0, -0.5};
  const TransitionKernel p = state_independent_kernel(3, rho);
  for (SearchMode m : {SearchMode::kEnumerate, SearchMode::kIterate}) {
    EXPECT_EQ(mdp_policy_search(r, p, rho, m), (Policy{1, 0, 2}));
  }
}

TEST(PolicySearch, CraftedTwoStateEnumeration) {
  // Action 0 in state 0 and action 1 in state 1 are self-loops; the other
  // actions move to the other state.
  const TransitionKernel p = kernel_from_rows(2, 2, {1, 0, 0, 1, /**/ 1, 0, 0, 1});
  const std::vector<double> rho = {0.5, 0.5};
  const std::vector<double> r = {1.0, 3.0, 2.0, 0.5};
  // Hand-computed objectives: (0,0) absorbs in 0 -> 1; (0,1) both absorb
  // -> 0.75; (1,0) cycles -> 2.5; (1,1) absorbs in 1 -> 0.5.
  const double expected[4] = {1.0, 0.75, 2.5, 0.5};
  const Policy all[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int q = 0; q < 4; ++q) EXPECT_NEAR(policy_objective(r, p, rho, all[q]), expected[q], 1e-9);
  EXPECT_EQ(mdp_policy_search(r, p, rho, SearchMode::kEnumerate), (Policy{1, 0}));
  EXPECT_EQ(mdp_policy_search(r, p, rho, SearchMode::kIterate), (Policy{1, 0}));
}

TEST(PolicySearch, EnumerateTiesGoToTheSmallestEncoding) {
  const std::vector<double> rho = {0.5, 0.5};
  const std::vector<double> r = {1.0, 1.0, 0.0, 0.0};
  EXPECT_EQ(mdp_policy_search(r, state_independent_kernel(2, rho), rho, SearchMode::kEnumerate),
            (Policy{0, 0}));
  EXPECT_EQ(optimal_policies(r, state_independent_kernel(2, rho), rho).size(), 4u);
}

TEST(PolicySearch, EnumerateMatchesPolicyIterationOnRandomMdps) {
  Engine rng(2024);
  std::uniform_int_distribution<int> dim(1, 4);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int s = dim(rng), a = dim(rng);
    const TransitionKernel p = testing::random_kernel(rng, s, a);
    const std::vector<double> rho = testing::random_simplex(rng, s);
    std::vector<double> r(static_cast<std::size_t>(s) * a);
    for (double& x : r) x = z(rng);
    const Policy e = mdp_policy_search(r, p, rho, SearchMode::kEnumerate);
    const Policy it = mdp_policy_search(r, p, rho, SearchMode::kIterate);
    EXPECT_NEAR(policy_objective(r, p, rho, e), policy_objective(r, p, rho, it), 1e-9)
        << "trial " << trial;
  }
}

TEST(PolicySearch, EnumerationCap) {
  const std::vector<double> rho(7, 1.0 / 7);
  const TransitionKernel p = state_independent_kernel(10, rho);
  const std::vector<double> r(70, 0.0);
  EXPECT_THROW(mdp_policy_search(r, p, rho, SearchMode::kEnumerate), ValidationError);
  EXPECT_NO_THROW(mdp_policy_search(r, p, rho, SearchMode::kIterate));
}

TEST(Regret, Examples) {
  const Instance v = t1();
  const TransitionKernel p = state_independent_kernel(2, v.rho);
  EXPECT_EQ(mdp_regret(v, p, {0}), 0.0);
  EXPECT_NEAR(mdp_regret(v, p, {1}), 1.0, 1e-12);

  GeneratorConfig cfg;
  cfg.seed = 11;
  const Instance w = make_benchmark_instance(cfg);
  const TransitionKernel q = state_independent_kernel(w.num_actions(), w.rho);
  const std::vector<int> best = best_actions(w);
  const std::vector<double> gaps = suboptimality_gaps(w);
  EXPECT_EQ(optimal_policy(w, q), Policy(best.begin(), best.end()));
  for (int i = 0; i < w.num_actions(); ++i) {
    Policy pi(best.begin(), best.end());
    pi[0] = i;
    EXPECT_NEAR(mdp_regret(w, q, pi), w.rho[0] * gaps[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(Regret, NonNegativeAndZeroOnlyAtTheOptimum) {
  Engine rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Instance v = testing::random_consistent_instance(rng);
    const TransitionKernel p = testing::random_kernel(rng, v.num_states(), v.num_actions());
    Policy star;
    try {
      star = optimal_policy(v, p);
    } catch (const ValidationError&) {
      continue;
    }
    const double best = policy_objective(true_rewards(v), p, v.rho, star);
    for (int k = 0; k < v.num_states(); ++k) {
      for (int i = 0; i < v.num_actions(); ++i) {
        Policy pi = star;
        pi[static_cast<std::size_t>(k)] = i;
        const double reg = mdp_regret(v, p, pi);
        EXPECT_GE(reg, 0.0);
        const double obj = policy_objective(true_rewards(v), p, v.rho, pi);
        EXPECT_NEAR(reg, std::max(0.0, best - obj), 1e-12);
      }
    }
  }
}

TEST(Regret, NonUniqueOptimumIsAnError) {
  // State 1 is never visited, so both of its actions are optimal.
  const Instance v = t2(1.0 - 0.0);
  Instance w = v;
  w.rho = {1.0, 0.0};
  EXPECT_THROW(optimal_policy(w, self_loop_kernel(2, 2)), ValidationError);
  EXPECT_THROW(mdp_regret(w, self_loop_kernel(2, 2), {0, 0}), ValidationError);
  EXPECT_THROW(mdp_hardness(w, self_loop_kernel(2, 2)), ValidationError);
}

TEST(RlLowMdp, ReducesToStaticSelection) {
  GeneratorConfig cfg;
  cfg.seed = 3;
  const Instance v = make_benchmark_instance(cfg);
  const TransitionKernel rows = state_independent_kernel(v.num_actions(), v.rho);
  const TransitionKernel loops = self_loop_kernel(v.num_states(), v.num_actions());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PreferenceDataset data = sample_dataset(v, 100, seed);
    const EstimateReport plain = rl_low(data, v.features, v.reward_bound, seed);
    const Policy expected(plain.selections.begin(), plain.selections.end());
    EXPECT_EQ(rl_low_mdp(data, v.features, v.reward_bound, rows, v.rho, seed), expected);
    EXPECT_EQ(rl_low_mdp(data, v.features, v.reward_bound, loops, v.rho, seed), expected);
  }
}

TEST(RlLowMdp, T1LiftPicksTheBetterActionWithEnoughData) {
  const Instance v = t1();
  const TransitionKernel p = state_independent_kernel(2, v.rho);
  int correct = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    correct += rl_low_mdp(sample_dataset(v, 2000, seed), v.features, 1.0, p, v.rho, seed) == Policy{0};
  }
  EXPECT_GE(correct, 99);
}

TEST(MdpHardness, SingleStateLiftOfT1) {
  const Instance v = t1();
  const MdpHardness h = mdp_hardness(v, state_independent_kernel(2, v.rho));
  EXPECT_NEAR(h.hardness, 1.0, 1e-12);
  EXPECT_EQ(h.optimal, Policy{0});
  ASSERT_EQ(h.policies.size(), 1u);
  EXPECT_NEAR(h.policies[0].gamma, 1.0, 1e-12);
  EXPECT_NEAR(h.policies[0].gap, 1.0, 1e-12);
}

TEST(MdpHardness, T2WithRhoRowsIsOccupancyWeighted) {
  // Flipping state 0 alone costs rho_0 * 1 in objective with gamma = 1.
  const Instance v = t2(0.4);
  const MdpHardness h = mdp_hardness(v, state_independent_kernel(2, v.rho));
  EXPECT_NEAR(h.hardness, 1.0 / (0.4 * 0.4), 1e-10);
  EXPECT_EQ(h.policies.size(), 3u);
}

// With rho rows, the objective gap of pi is sum_k rho_k * gap(k, pi(k)).
double rho_rows_oracle(const Instance& v) {
  const WeightModel model = WeightModel::build(v.features, v.schedule);
  const std::vector<int> best = best_actions(v);
  const std::vector<double> gaps = suboptimality_gaps(v);
  const int s = v.num_states(), a = v.num_actions();
  std::size_t total = 1;
  for (int k = 0; k < s; ++k) total *= static_cast<std::size_t>(a);
  double h = 0.0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    double gap = 0.0, gamma = 0.0;
    bool differs = false;
    for (int k = s - 1; k >= 0; --k) {
      const int i = static_cast<int>(rest % a);
      rest /= a;
      if (i == best[k]) continue;
      differs = true;
      gap += v.rho[k] * gaps[static_cast<std::size_t>(k) * a + i];
      gamma = std::max(gamma, model.variance_norm({k, i, best[k]}));
    }
    if (differs) h = std::max(h, gamma / (gap * gap));
  }
  return h;
}

TEST(MdpHardness, MatchesEnumerationOracleWithRhoRows) {
  Engine rng(41);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Instance v = testing::random_consistent_instance(rng);
    const TransitionKernel p = state_independent_kernel(v.num_actions(), v.rho);
    try {
      optimal_policy(v, p);
    } catch (const ValidationError&) {
      continue;
    }
    const double oracle = rho_rows_oracle(v);
    EXPECT_NEAR(mdp_hardness(v, p).hardness, oracle, 1e-9 * oracle);
    ++checked;
  }
  EXPECT_GE(checked, 30);
}

}  // namespace
}  // namespace rllow
