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

#include "rllow/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace rllow {
namespace {

constexpr double kObjectiveTieTolerance = 1e-12;
constexpr std::size_t kMaxOccupancySteps = 100'000;
constexpr int kMaxPolicyIterations = 1000;

void check_policy(const TransitionKernel& kernel, const Policy& policy) {
  if (policy.size() != static_cast<std::size_t>(kernel.num_states)) {
    throw ValidationError("policy must assign one action per state");
  }
  for (int a : policy) {
    if (a < 0 || a >= kernel.num_actions) throw ValidationError("policy action out of range");
  }
}

void check_rho(const TransitionKernel& kernel, std::span<const double> rho) {
  if (rho.size() != static_cast<std::size_t>(kernel.num_states)) {
    throw ValidationError("rho must have one entry per state");
  }
}

Eigen::MatrixXd policy_matrix(const TransitionKernel& kernel, const Policy& policy) {
  const int s = kernel.num_states;
  Eigen::MatrixXd p(s, s);
  for (int k = 0; k < s; ++k) {
    for (int next = 0; next < s; ++next) p(k, next) = kernel(k, policy[k], next);
  }
  return p;
}

std::size_t policy_count(const TransitionKernel& kernel) {
  std::size_t count = 1;
  for (int k = 0; k < kernel.num_states; ++k) {
    if (count > kMaxEnumeratedPolicies / static_cast<std::size_t>(kernel.num_actions)) {
      throw ValidationError("policy enumeration: A^S exceeds " +
                            std::to_string(kMaxEnumeratedPolicies));
    }
    count *= static_cast<std::size_t>(kernel.num_actions);
  }
  return count;
}

// Policy with the given lexicographic index (state 0 most significant).
Policy decode_policy(std::size_t index, int num_states, int num_actions) {
  Policy p(static_cast<std::size_t>(num_states));
  for (int k = num_states - 1; k >= 0; --k) {
    p[k] = static_cast<int>(index % static_cast<std::size_t>(num_actions));
    index /= static_cast<std::size_t>(num_actions);
  }
  return p;
}

bool within_tie(double value, double best) {
  return std::abs(value - best) <= kObjectiveTieTolerance * (1.0 + std::abs(best));
}

std::vector<double> enumerate_objectives(std::span<const double> rewards,
                                         const TransitionKernel& kernel,
                                         std::span<const double> rho) {
  const std::size_t count = policy_count(kernel);
  std::vector<double> values(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    values[idx] = policy_objective(rewards, kernel, rho,
                                   decode_policy(idx, kernel.num_states, kernel.num_actions));
  }
  return values;
}

// Limit of the lazy chain's powers, by repeated squaring. Rows are
// renormalized after every product; otherwise a row-sum error of one ulp
// doubles with each squaring and eventually overflows.
Eigen::MatrixXd limit_projector(const Eigen::MatrixXd& p) {
  const Eigen::Index s = p.rows();
  Eigen::MatrixXd q = 0.5 * (Eigen::MatrixXd::Identity(s, s) + p);
  for (int step = 0; step < 200; ++step) {
    Eigen::MatrixXd next = q * q;
    for (Eigen::Index k = 0; k < s; ++k) next.row(k) /= next.row(k).sum();
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change <= 1e-14) return q;
  }
  throw NumericalError("limit projector did not converge");
}

Policy policy_iteration(std::span<const double> rewards, const TransitionKernel& kernel) {
  const int s = kernel.num_states;
  const int a = kernel.num_actions;
  double scale = 1.0;
  for (double r : rewards) scale = std::max(scale, std::abs(r));
  const double tol = 1e-11 * scale;

  Policy policy(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) {
    const auto row = rewards.subspan(static_cast<std::size_t>(k) * a, static_cast<std::size_t>(a));
    policy[k] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }

  for (int iter = 0; iter < kMaxPolicyIterations; ++iter) {
    const Eigen::MatrixXd p = policy_matrix(kernel, policy);
    Eigen::VectorXd r(s);
    for (int k = 0; k < s; ++k) r(k) = rewards[static_cast<std::size_t>(k) * a + policy[k]];
    const Eigen::MatrixXd pi = limit_projector(p);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(s, s);
    const Eigen::VectorXd gain = pi * r;
    const Eigen::VectorXd bias = (eye - p + pi).fullPivLu().solve((eye - pi) * r);

    auto expected = [&](int k, int action, const Eigen::VectorXd& values) {
      double total = 0.0;
      for (int next = 0; next < s; ++next) total += kernel(k, action, next) * values(next);
      return total;
    };

    bool changed = false;
    std::vector<double> best_gain(static_cast<std::size_t>(s));
    for (int k = 0; k < s; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      int arg = policy[k];
      for (int act = 0; act < a; ++act) {
        const double v = expected(k, act, gain);
        if (v > best) {
          best = v;
          arg = act;
        }
      }
      best_gain[k] = best;
      if (best > expected(k, policy[k], gain) + tol) {
        policy[k] = arg;
        changed = true;
      }
    }
    if (changed) continue;

    for (int k = 0; k < s; ++k) {
      const auto value = [&](int act) {
        return rewards[static_cast<std::size_t>(k) * a + act] + expected(k, act, bias);
      };
      double best = value(policy[k]);
      int arg = policy[k];
      for (int act = 0; act < a; ++act) {
        if (expected(k, act, gain) < best_gain[k] - tol) continue;
        const double v = value(act);
        if (v > best + tol) {
          best = v;
          arg = act;
        }
      }
      if (arg != policy[k]) {
        policy[k] = arg;
        changed = true;
      }
    }
    if (!changed) return policy;
  }
  throw NumericalError("policy iteration did not converge");
}

}  // namespace

TransitionKernel validate_kernel(const TransitionKernel& kernel) {
  if (kernel.num_states <= 0 || kernel.num_actions <= 0 ||
      kernel.probs.size() != static_cast<std::size_t>(kernel.num_states) *
                                 kernel.num_actions * kernel.num_states) {
    throw ValidationError("kernel must have shape S x A x S");
  }
  for (int k = 0; k < kernel.num_states; ++k) {
    for (int i = 0; i < kernel.num_actions; ++i) {
      double total = 0.0;
      for (int next = 0; next < kernel.num_states; ++next) {
        const double p = kernel(k, i, next);
        if (!(p >= 0.0 && p <= 1.0 + 1e-12)) throw ValidationError("kernel entries must be probabilities");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("kernel row (" + std::to_string(k) + "," + std::to_string(i) +
                              ") does not sum to 1");
      }
    }
  }
  return kernel;
}

TransitionKernel state_independent_kernel(int num_actions, std::span<const double> rho) {
  TransitionKernel kernel;
  kernel.num_states = static_cast<int>(rho.size());
  kernel.num_actions = num_actions;
  for (int k = 0; k < kernel.num_states; ++k) {
    for (int i = 0; i < num_actions; ++i) kernel.probs.insert(kernel.probs.end(), rho.begin(), rho.end());
  }
  return kernel;
}

TransitionKernel self_loop_kernel(int num_states, int num_actions) {
  TransitionKernel kernel;
  kernel.num_states = num_states;
  kernel.num_actions = num_actions;
  kernel.probs.assign(static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
  for (int k = 0; k < num_states; ++k) {
    for (int i = 0; i < num_actions; ++i) {
      kernel.probs[(static_cast<std::size_t>(k) * num_actions + i) * num_states + k] = 1.0;
    }
  }
  return kernel;
}

std::vector<double> stationary_distribution(const TransitionKernel& kernel,
                                            const Policy& policy,
                                            std::span<const double> rho) {
  check_policy(kernel, policy);
  check_rho(kernel, rho);
  const int s = kernel.num_states;
  std::vector<double> x(rho.begin(), rho.end());
  std::vector<double> next(static_cast<std::size_t>(s));
  for (std::size_t step = 0; step < kMaxOccupancySteps; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int k = 0; k < s; ++k) {
      const double mass = x[k];
      if (mass == 0.0) continue;
      for (int to = 0; to < s; ++to) next[to] += mass * kernel(k, policy[k], to);
    }
    double increment = 0.0;
    for (int k = 0; k < s; ++k) {
      const double lazy = 0.5 * (x[k] + next[k]);
      increment += std::abs(lazy - x[k]);
      next[k] = lazy;
    }
    x.swap(next);
    if (0.5 * increment <= 1e-10) {
      double total = 0.0;
      for (double& v : x) {
        if (v < 0.0) v = 0.0;
        total += v;
      }
      for (double& v : x) v /= total;
      return x;
    }
  }
  throw NumericalError("stationary distribution did not converge");
}

double policy_objective(std::span<const double> rewards, const TransitionKernel& kernel,
                        std::span<const double> rho, const Policy& policy) {
  if (rewards.size() != static_cast<std::size_t>(kernel.num_states) * kernel.num_actions) {
    throw ValidationError("rewards must be S x A");
  }
  const std::vector<double> d = stationary_distribution(kernel, policy, rho);
  double total = 0.0;
  for (int k = 0; k < kernel.num_states; ++k) {
    total += d[k] * rewards[static_cast<std::size_t>(k) * kernel.num_actions + policy[k]];
  }
  return total;
}

Policy mdp_policy_search(std::span<const double> rewards, const TransitionKernel& kernel,
                         std::span<const double> rho, SearchMode mode) {
  check_rho(kernel, rho);
  if (rewards.size() != static_cast<std::size_t>(kernel.num_states) * kernel.num_actions) {
    throw ValidationError("rewards must be S x A");
  }
  if (mode == SearchMode::kIterate) return policy_iteration(rewards, kernel);
  const std::vector<double> values = enumerate_objectives(rewards, kernel, rho);
  const std::size_t best = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  return decode_policy(best, kernel.num_states, kernel.num_actions);
}

std::vector<Policy> optimal_policies(std::span<const double> rewards,
                                     const TransitionKernel& kernel,
                                     std::span<const double> rho) {
  const std::vector<double> values = enumerate_objectives(rewards, kernel, rho);
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<Policy> out;
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (within_tie(values[idx], best)) {
      out.push_back(decode_policy(idx, kernel.num_states, kernel.num_actions));
    }
  }
  return out;
}

Policy optimal_policy(const Instance& v, const TransitionKernel& kernel) {
  if (kernel.num_states != v.num_states() || kernel.num_actions != v.num_actions()) {
    throw ValidationError("kernel shape does not match the instance");
  }
  const std::vector<Policy> best = optimal_policies(true_rewards(v), kernel, v.rho);
  if (best.size() != 1) {
    throw ValidationError("optimal MDP policy is not unique");
  }
  return best.front();
}

double mdp_regret(const Instance& v, const TransitionKernel& kernel, const Policy& policy) {
  const Policy star = optimal_policy(v, kernel);
  const std::vector<double> rewards = true_rewards(v);
  const double gap = policy_objective(rewards, kernel, v.rho, star) -
                     policy_objective(rewards, kernel, v.rho, policy);
  return std::max(gap, 0.0);
}

Policy rl_low_mdp(const PreferenceDataset& data, const FeatureMap& features,
                  double reward_bound, const TransitionKernel& kernel,
                  std::span<const double> rho, std::uint64_t tie_seed) {
  if (kernel.num_states != features.num_states || kernel.num_actions != features.num_actions) {
    throw ValidationError("kernel shape does not match the features");
  }
  const EstimateReport report = rl_low(data, features, reward_bound, tie_seed);
  std::size_t count = 0;
  try {
    count = policy_count(kernel);
  } catch (const ValidationError&) {
    return mdp_policy_search(report.rhat, kernel, rho, SearchMode::kIterate);
  }
  (void)count;
  const std::vector<Policy> best = optimal_policies(report.rhat, kernel, rho);
  // Closest optimal policy (Hamming) to the static selection; first wins.
  const Policy* chosen = &best.front();
  int chosen_distance = std::numeric_limits<int>::max();
  for (const Policy& p : best) {
    int distance = 0;
    for (std::size_t k = 0; k < p.size(); ++k) distance += p[k] != report.selections[k];
    if (distance < chosen_distance) {
      chosen_distance = distance;
      chosen = &p;
    }
  }
  return *chosen;
}

MdpHardness mdp_hardness(const Instance& v, const TransitionKernel& kernel) {
  const Policy star = optimal_policy(v, kernel);
  const std::vector<double> rewards = true_rewards(v);
  const double best = policy_objective(rewards, kernel, v.rho, star);
  const WeightModel model = WeightModel::build(v.features, v.schedule);

  const int s = v.num_states();
  const int a = v.num_actions();
  // norms[k * A + i] = || [phi(k,i) - phi(k,pi*(k))]_G ||^2_{V^{-1}}
  std::vector<double> norms(static_cast<std::size_t>(s) * a, 0.0);
  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < a; ++i) {
      if (i != star[k]) {
        norms[static_cast<std::size_t>(k) * a + i] = model.variance_norm(Target{k, i, star[k]});
      }
    }
  }

  MdpHardness out;
  out.optimal = star;
  const std::size_t count = policy_count(kernel);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Policy p = decode_policy(idx, s, a);
    if (p == star) continue;
    PolicyHardness entry;
    for (int k = 0; k < s; ++k) {
      if (p[k] != star[k]) {
        entry.gamma = std::max(entry.gamma, norms[static_cast<std::size_t>(k) * a + p[k]]);
      }
    }
    entry.gap = best - policy_objective(rewards, kernel, v.rho, p);
    if (!(entry.gap > 0.0)) throw ValidationError("optimal MDP policy is not unique");
    out.hardness = std::max(out.hardness, entry.gamma / (entry.gap * entry.gap));
    entry.policy = std::move(p);
    out.policies.push_back(std::move(entry));
  }
  return out;
}

}  // namespace rllow
