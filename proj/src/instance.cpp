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

#include "rllow/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rllow/kernels.hpp"
#include "rllow/rng.hpp"
#include "rllow/span_basis.hpp"

namespace rllow {
namespace {

constexpr double kSumTolerance = 1e-12;

std::string pair_label(int k, int i, int j) {
  return "(" + std::to_string(k) + "," + std::to_string(i) + "," +
         std::to_string(j) + ")";
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> FeatureMap::difference(int k, int i, int j) const {
  const auto a = row(k, i);
  const auto b = row(k, j);
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int c = 0; c < dim; ++c) out[c] = a[c] - b[c];
  return out;
}

Schedule::Schedule(int num_states, int num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      values_(static_cast<std::size_t>(num_states) * num_actions * num_actions,
              0.0) {}

void Schedule::set(int k, int i, int j, double value) {
  if (k < 0 || k >= num_states_ || i < 0 || j >= num_actions_ || i >= j) {
    throw ValidationError("schedule entry " + pair_label(k, i, j) +
                          " must satisfy 0 <= i < j < A");
  }
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw ValidationError("schedule entry " + pair_label(k, i, j) +
                          " must lie in [0, 1]");
  }
  values_[index(k, i, j)] = value;
}

std::vector<ObservedPair> Schedule::observed() const {
  std::vector<ObservedPair> out;
  for (int k = 0; k < num_states_; ++k) {
    for (int i = 0; i < num_actions_; ++i) {
      for (int j = i + 1; j < num_actions_; ++j) {
        const double n = values_[index(k, i, j)];
        if (n > 0.0) out.push_back({{k, i, j}, n});
      }
    }
  }
  return out;
}

double Schedule::total() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum;
}

Schedule Schedule::scaled(double factor) const {
  Schedule out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

Instance validate_instance(const Instance& v) {
  const int s = v.features.num_states;
  const int a = v.features.num_actions;
  const int d = v.features.dim;
  if (s <= 0 || a <= 0 || d <= 0) {
    throw ValidationError("shape mismatch: S, A and d must be positive");
  }
  if (v.features.values.size() != static_cast<std::size_t>(s) * a * d ||
      v.theta.size() != static_cast<std::size_t>(d) ||
      v.rho.size() != static_cast<std::size_t>(s) ||
      v.schedule.num_states() != s || v.schedule.num_actions() != a) {
    throw ValidationError("shape mismatch between features, theta, rho and schedule");
  }
  for (double x : v.features.values) {
    if (!std::isfinite(x)) throw ValidationError("features must be finite");
  }
  for (double x : v.theta) {
    if (!std::isfinite(x)) throw ValidationError("theta must be finite");
  }
  if (!std::isfinite(v.reward_bound) || v.reward_bound < 0.0) {
    throw ValidationError("reward bound must be a nonnegative real");
  }

  double rho_sum = 0.0;
  for (double p : v.rho) {
    if (!(p > 0.0)) throw ValidationError("rho must be strictly positive");
    rho_sum += p;
  }
  if (std::abs(rho_sum - 1.0) > kSumTolerance) {
    throw ValidationError("rho must sum to 1");
  }

  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < a; ++j) {
        const double n = v.schedule(k, i, j);
        if (i >= j && n != 0.0) {
          throw ValidationError("schedule entries with i >= j must be zero");
        }
        if (!(n >= 0.0 && n <= 1.0)) {
          throw ValidationError("schedule entries must lie in [0, 1]");
        }
      }
    }
  }
  if (std::abs(v.schedule.total() - 1.0) > kSumTolerance) {
    throw ValidationError("schedule must sum to 1");
  }

  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < a; ++i) {
      for (int j = i + 1; j < a; ++j) {
        const auto fi = v.features.row(k, i);
        const auto fj = v.features.row(k, j);
        if (std::equal(fi.begin(), fi.end(), fj.begin())) {
          throw ValidationError("duplicate features for actions " +
                                std::to_string(i) + " and " + std::to_string(j) +
                                " in state " + std::to_string(k));
        }
      }
    }
  }

  const std::vector<double> rewards = true_rewards(v);
  const double slack = 1e-12 * std::max(1.0, v.reward_bound);
  for (double r : rewards) {
    if (std::abs(r) > v.reward_bound + slack) {
      throw ValidationError("reward bound violated: |r| = " + std::to_string(std::abs(r)) +
                            " > L = " + std::to_string(v.reward_bound));
    }
  }
  for (int k = 0; k < s; ++k) {
    const auto first = rewards.begin() + static_cast<std::ptrdiff_t>(k) * a;
    const double best = *std::max_element(first, first + a);
    if (std::count(first, first + a, best) > 1) {
      throw ValidationError("best action is not unique in state " + std::to_string(k));
    }
  }
  return v;
}

double true_reward(const Instance& v, int k, int i) {
  if (!v.features.in_range(k, i)) {
    throw ValidationError("true_reward: index out of range");
  }
  return kernels::dot(v.features.row(k, i), v.theta);
}

std::vector<double> true_rewards(const Instance& v) {
  std::vector<double> out(static_cast<std::size_t>(v.num_states()) * v.num_actions());
  kernels::row_dots(v.features.values, static_cast<std::size_t>(v.dim()), v.theta, out);
  return out;
}

std::vector<int> best_actions(const Instance& v) {
  const std::vector<double> r = true_rewards(v);
  const int a = v.num_actions();
  std::vector<int> out(static_cast<std::size_t>(v.num_states()));
  for (int k = 0; k < v.num_states(); ++k) {
    const auto first = r.begin() + static_cast<std::ptrdiff_t>(k) * a;
    out[k] = static_cast<int>(std::max_element(first, first + a) - first);
  }
  return out;
}

std::vector<double> suboptimality_gaps(const Instance& v) {
  std::vector<double> r = true_rewards(v);
  const int a = v.num_actions();
  for (int k = 0; k < v.num_states(); ++k) {
    const auto first = r.begin() + static_cast<std::ptrdiff_t>(k) * a;
    const double best = *std::max_element(first, first + a);
    for (int i = 0; i < a; ++i) first[i] = best - first[i];
  }
  return r;
}

ConsistencyResult check_consistency(const FeatureMap& features,
                                    const Schedule& schedule) {
  if (features.num_actions < 2) return {};
  if (schedule.observed().empty()) return {false, PairIndex{0, 0, 1}};
  const SpanBasis basis = SpanBasis::of_observed_differences(features, schedule);
  // Differences against action 0 generate every within-state difference.
  for (int k = 0; k < features.num_states; ++k) {
    for (int i = 1; i < features.num_actions; ++i) {
      if (!basis.contains(features.difference(k, 0, i))) {
        return {false, PairIndex{k, 0, i}};
      }
    }
  }
  return {};
}

ConsistencyResult check_consistency(const Instance& v) {
  return check_consistency(v.features, v.schedule);
}

Instance make_benchmark_instance(const GeneratorConfig& cfg) {
  if (cfg.num_states < 1 || cfg.dim < 1) {
    throw ValidationError("generator: S and d must be positive");
  }
  if (cfg.num_actions < 2) throw ValidationError("generator: A must be at least 2");
  if (!(cfg.gap_step > 0.0)) throw ValidationError("generator: gap_step must be positive");
  for (const auto& p : {cfg.epsilon, cfg.delta}) {
    if (p && !(*p > 0.0 && *p < 1.0)) {
      throw ValidationError("generator: privacy parameters must lie in (0, 1)");
    }
  }

  const int s = cfg.num_states;
  const int a = cfg.num_actions;
  const int d = cfg.dim;
  Instance v;
  v.features = FeatureMap(s, a, d);
  v.theta.assign(static_cast<std::size_t>(d), 1.0);
  if (s == 2) {
    v.rho = {0.4, 0.6};
  } else {
    v.rho.assign(static_cast<std::size_t>(s), 1.0 / s);
  }

  // Normalized exponentials are uniform on the simplex.
  Engine engine = make_engine(cfg.seed, "benchmark-features");
  std::exponential_distribution<double> exponential(1.0);
  const double theta_sq = static_cast<double>(d);
  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < a; ++i) {
      auto row = v.features.row(k, i);
      double total = 0.0;
      for (double& x : row) {
        x = exponential(engine);
        total += x;
      }
      const double shift = cfg.gap_step / theta_sq * i;
      for (int c = 0; c < d; ++c) row[c] = row[c] / total - shift * v.theta[c];
    }
  }

  v.schedule = Schedule(s, a);
  const double proportion = 2.0 / (static_cast<double>(s) * a * (a - 1));
  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < a; ++i) {
      for (int j = i + 1; j < a; ++j) v.schedule.set(k, i, j, proportion);
    }
  }

  double max_abs = 0.0;
  for (double r : true_rewards(v)) max_abs = std::max(max_abs, std::abs(r));
  // Rounded up to one decimal; float noise above a multiple of 0.1 stays
  // inside the validation slack instead of bumping L by a whole step.
  v.reward_bound = std::ceil(max_abs * 10.0 - 1e-9) / 10.0;
  if (max_abs > v.reward_bound * (1.0 + 1e-12)) v.reward_bound += 0.1;
  return validate_instance(v);
}

std::size_t records_for_pair(double proportion, std::size_t n) {
  const double x = proportion * static_cast<double>(n);
  const double nearest = std::round(x);
  // ceil(N n) up to representation error in N.
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(x));
}

PreferenceDataset sample_dataset(const Instance& v, std::size_t n,
                                 std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_dataset: n must be at least 1");
  const std::vector<double> rewards = true_rewards(v);
  const int a = v.num_actions();
  Engine engine = make_engine(seed, "dataset-labels");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PreferenceDataset data;
  for (const ObservedPair& pair : v.schedule.observed()) {
    const PairIndex& p = pair.index;
    const double win_prob =
        sigmoid(rewards[static_cast<std::size_t>(p.state) * a + p.first] -
                rewards[static_cast<std::size_t>(p.state) * a + p.second]);
    const std::size_t count = records_for_pair(pair.proportion, n);
    for (std::size_t r = 0; r < count; ++r) {
      data.records.push_back({p.state, p.first, p.second, unit(engine) < win_prob});
    }
  }
  return data;
}

Schedule empirical_proportions(const PreferenceDataset& data, int num_states,
                               int num_actions) {
  if (num_states < 1 || num_actions < 1) {
    throw ValidationError("empirical_proportions: dimensions must be positive");
  }
  std::vector<std::size_t> counts(
      static_cast<std::size_t>(num_states) * num_actions * num_actions, 0);
  for (const PreferenceRecord& rec : data.records) {
    if (rec.state < 0 || rec.state >= num_states || rec.first < 0 ||
        rec.second >= num_actions || rec.first >= rec.second) {
      throw ValidationError("record " + pair_label(rec.state, rec.first, rec.second) +
                            " is out of range or not ordered first < second");
    }
    ++counts[(static_cast<std::size_t>(rec.state) * num_actions + rec.first) *
                 num_actions + rec.second];
  }
  Schedule out(num_states, num_actions);
  if (data.size() == 0) return out;
  const double n = static_cast<double>(data.size());
  for (int k = 0; k < num_states; ++k) {
    for (int i = 0; i < num_actions; ++i) {
      for (int j = i + 1; j < num_actions; ++j) {
        const std::size_t c =
            counts[(static_cast<std::size_t>(k) * num_actions + i) * num_actions + j];
        if (c > 0) out.set(k, i, j, static_cast<double>(c) / n);
      }
    }
  }
  return out;
}

}  // namespace rllow
