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

// Problem instances of the linear Bradley-Terry-Luce preference model and
// the offline comparison datasets drawn from them.
//
// All indices are zero-based. A comparison pair is always stored with
// first < second; the "winner_is_first" bit records the label.

#ifndef RLLOW_INSTANCE_HPP_
#define RLLOW_INSTANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rllow/error.hpp"

namespace rllow {

// phi(k, i) for every state-action pair, stored (S*A) x d row-major.
struct FeatureMap {
  int num_states = 0;
  int num_actions = 0;
  int dim = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(int s, int a, int d)
      : num_states(s), num_actions(a), dim(d),
        values(static_cast<std::size_t>(s) * a * d, 0.0) {}

  std::span<const double> row(int k, int i) const {
    return {values.data() + offset(k, i), static_cast<std::size_t>(dim)};
  }
  std::span<double> row(int k, int i) {
    return {values.data() + offset(k, i), static_cast<std::size_t>(dim)};
  }
  // phi(k, i) - phi(k, j)
  std::vector<double> difference(int k, int i, int j) const;

  bool in_range(int k, int i) const {
    return k >= 0 && k < num_states && i >= 0 && i < num_actions;
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t offset(int k, int i) const {
    return (static_cast<std::size_t>(k) * num_actions + i) * dim;
  }
};

struct ObservedPair {
  PairIndex index;
  double proportion = 0.0;
};

// Comparison proportions N[k][i][j]. Only entries with i < j may be nonzero.
class Schedule {
 public:
  Schedule() = default;
  Schedule(int num_states, int num_actions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double operator()(int k, int i, int j) const { return values_[index(k, i, j)]; }
  // Throws ValidationError unless i < j and value is finite and nonnegative.
  void set(int k, int i, int j, double value);

  // Pairs with N > 0 in lexicographic (k, i, j) order.
  std::vector<ObservedPair> observed() const;
  double total() const;
  Schedule scaled(double factor) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * num_actions_ + i) * num_actions_ + j;
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> values_;
};

struct Instance {
  FeatureMap features;
  std::vector<double> theta;
  std::vector<double> rho;
  Schedule schedule;
  double reward_bound = 0.0;

  int num_states() const { return features.num_states; }
  int num_actions() const { return features.num_actions; }
  int dim() const { return features.dim; }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct PreferenceRecord {
  int state = 0;
  int first = 0;
  int second = 0;
  bool winner_is_first = false;

  friend bool operator==(const PreferenceRecord&, const PreferenceRecord&) = default;
};

struct PreferenceDataset {
  std::vector<PreferenceRecord> records;

  std::size_t size() const { return records.size(); }
  friend bool operator==(const PreferenceDataset&, const PreferenceDataset&) = default;
};

struct GeneratorConfig {
  int num_states = 2;
  int num_actions = 10;
  int dim = 5;
  double gap_step = 0.05;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  std::optional<double> delta;
};

struct ConsistencyResult {
  bool consistent = true;
  std::optional<PairIndex> witness;
};

// Returns the instance unchanged iff every structural invariant holds;
// throws ValidationError naming the first violation otherwise.
Instance validate_instance(const Instance& candidate);

double true_reward(const Instance& v, int k, int i);
// r[k * A + i] for every state-action pair.
std::vector<double> true_rewards(const Instance& v);
// Unique maximizing action per state (validated instances only).
std::vector<int> best_actions(const Instance& v);
// Delta[k * A + i] = max_j r[k][j] - r[k][i].
std::vector<double> suboptimality_gaps(const Instance& v);

// True iff every within-state feature difference lies in the span of the
// observed differences; otherwise reports one offending (k, i, j).
ConsistencyResult check_consistency(const FeatureMap& features,
                                    const Schedule& schedule);
ConsistencyResult check_consistency(const Instance& v);

// Synthetic benchmark instance: simplex features shifted by a per-action
// offset along theta = 1, uniform comparison schedule.
Instance make_benchmark_instance(const GeneratorConfig& cfg);

// ceil(N * n) records per observed pair with BTL labels. Deterministic in
// (v, n, seed).
PreferenceDataset sample_dataset(const Instance& v, std::size_t n,
                                 std::uint64_t seed);

// Number of records sampled for a pair with proportion N at nominal size n.
std::size_t records_for_pair(double proportion, std::size_t n);

Schedule empirical_proportions(const PreferenceDataset& data, int num_states,
                               int num_actions);

double sigmoid(double x);

}  // namespace rllow

#endif  // RLLOW_INSTANCE_HPP_
