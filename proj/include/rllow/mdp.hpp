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

// Known-transition MDP layer: long-run state occupancy of deterministic
// policies, policy search over estimated rewards, MDP simple regret and the
// MDP hardness parameter.

#ifndef RLLOW_MDP_HPP_
#define RLLOW_MDP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rllow/estimator.hpp"
#include "rllow/instance.hpp"

namespace rllow {

struct TransitionKernel {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> probs;  // P(k' | k, i) at (k * A + i) * S + k'

  double operator()(int k, int i, int next) const {
    return probs[(static_cast<std::size_t>(k) * num_actions + i) * num_states + next];
  }
};

// Throws ValidationError unless every (k, i) row is a probability vector
// (nonnegative, sums to 1 within 1e-12).
TransitionKernel validate_kernel(const TransitionKernel& kernel);

// Kernel whose every row equals `rho`.
TransitionKernel state_independent_kernel(int num_actions, std::span<const double> rho);
// P(k | k, i) = 1.
TransitionKernel self_loop_kernel(int num_states, int num_actions);

using Policy = std::vector<int>;

// Cesaro occupancy lim_T (1/T) sum_{t<T} rho^T P_pi^t. Computed as the
// ordinary limit of the lazy chain (I + P_pi) / 2, which has the same
// limit projector and no periodicity; iterates until the total-variation
// increment is <= 1e-10 and throws NumericalError after 1e5 steps.
std::vector<double> stationary_distribution(const TransitionKernel& kernel,
                                            const Policy& policy,
                                            std::span<const double> rho);

// E_{k ~ d^pi}[rewards[k * A + pi(k)]].
double policy_objective(std::span<const double> rewards, const TransitionKernel& kernel,
                        std::span<const double> rho, const Policy& policy);

enum class SearchMode { kEnumerate, kIterate };

// Largest number of policies enumerate mode will visit.
inline constexpr std::size_t kMaxEnumeratedPolicies = 1'000'000;

// Policy maximizing policy_objective(rewards). Enumerate visits every
// policy (ties go to the lexicographically smallest); iterate runs
// multichain average-reward policy iteration.
Policy mdp_policy_search(std::span<const double> rewards, const TransitionKernel& kernel,
                         std::span<const double> rho, SearchMode mode);

// All policies within 1e-12 (relative) of the best objective, in
// lexicographic order. Enumerate-only.
std::vector<Policy> optimal_policies(std::span<const double> rewards,
                                     const TransitionKernel& kernel,
                                     std::span<const double> rho);

// The true optimal policy; throws ValidationError when it is not unique.
Policy optimal_policy(const Instance& v, const TransitionKernel& kernel);

double mdp_regret(const Instance& v, const TransitionKernel& kernel, const Policy& policy);

// Estimator pipeline followed by policy search on rhat. Ties between
// optimal policies are resolved toward the per-state selection the static
// estimator makes with the same tie seed.
Policy rl_low_mdp(const PreferenceDataset& data, const FeatureMap& features,
                  double reward_bound, const TransitionKernel& kernel,
                  std::span<const double> rho, std::uint64_t tie_seed);

struct PolicyHardness {
  Policy policy;
  double gamma = 0.0;  // max over disagreeing states of the target's V^{-1} norm
  double gap = 0.0;    // objective shortfall against the optimal policy
};

struct MdpHardness {
  double hardness = 0.0;
  Policy optimal;
  std::vector<PolicyHardness> policies;  // every policy other than the optimum
};

MdpHardness mdp_hardness(const Instance& v, const TransitionKernel& kernel);

}  // namespace rllow

#endif  // RLLOW_MDP_HPP_
