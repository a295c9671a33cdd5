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

// The locally-optimal-weights estimator: empirical success rates, clipping
// to the BTL-feasible range, the span basis and design matrix of observed
// comparisons, per-target minimum-variance weights, relative reward
// estimates and best-action selection.

#ifndef RLLOW_ESTIMATOR_HPP_
#define RLLOW_ESTIMATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rllow/instance.hpp"
#include "rllow/span_basis.hpp"

namespace rllow {

// Bounds of CLIP_L: [1 / (1 + e^{2L}), e^{2L} / (1 + e^{2L})].
double clip_lower(double reward_bound);
double clip_upper(double reward_bound);

// Throws ValidationError unless b lies in [0, 1] and L >= 0.
double clip_rate(double b, double reward_bound);

// Success rates B[k][i][j] over all ordered pairs. For an observed pair
// (i < j) B[k][i][j] is the fraction won by i and B[k][j][i] = 1 - B[k][i][j];
// unobserved entries are zero in both orientations.
struct SuccessRates {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> raw;
  std::vector<double> clipped;
  std::vector<std::uint8_t> observed;
  double clip_bound = 0.0;

  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * num_actions + i) * num_actions + j;
  }
  double raw_at(int k, int i, int j) const { return raw[index(k, i, j)]; }
  double clipped_at(int k, int i, int j) const { return clipped[index(k, i, j)]; }
  bool is_observed(int k, int i, int j) const { return observed[index(k, i, j)] != 0; }
};

// `schedule` must equal empirical_proportions(data); throws ValidationError
// on mismatch.
SuccessRates success_rates(const PreferenceDataset& data, const Schedule& schedule,
                           double reward_bound);

// Rebuilds both orientations of `rates` from new first-over-second values
// on the observed pairs (in Schedule::observed() order) and re-clips. Values
// outside [0, 1] are allowed and clipped.
SuccessRates with_first_rates(const SuccessRates& rates,
                              std::span<const ObservedPair> pairs,
                              std::span<const double> first_rates);

// V = sum_{observed} N [phi diff]_G [phi diff]_G^T. Throws NumericalError if
// the smallest eigenvalue is <= 1e-12 * trace(V).
Eigen::MatrixXd build_design_matrix(const Schedule& schedule,
                                    const FeatureMap& features,
                                    const SpanBasis& basis);

struct Target {
  int state = 0;
  int action = 0;
  int reference = 0;
};

// Label-free part of the estimator: everything that depends only on the
// features and the comparison proportions.
class WeightModel {
 public:
  // Throws InconsistencyError (with witness) when some within-state
  // difference is outside the observed span.
  static WeightModel build(const FeatureMap& features, const Schedule& schedule);
  // Same, with a caller-supplied orthonormal basis of the observed span.
  static WeightModel build(const FeatureMap& features, const Schedule& schedule,
                           SpanBasis basis);

  int num_states() const { return features_.num_states; }
  int num_actions() const { return features_.num_actions; }
  const FeatureMap& features() const { return features_; }
  const SpanBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& design_matrix() const { return design_; }
  std::span<const ObservedPair> pairs() const { return pairs_; }
  std::span<const double> proportions() const { return proportions_; }
  // [phi(k',i') - phi(k',j')]_G for each observed pair, row-major m x g.
  std::span<const double> pair_coordinates() const { return pair_coords_; }
  // [phi(k,i)]_G for every state-action pair, row-major (S*A) x g.
  std::span<const double> feature_coordinates() const { return feature_coords_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  // [phi(k,i) - phi(k,j)]_G
  Eigen::VectorXd target_coordinates(const Target& t) const;
  // || [phi(k,i) - phi(k,j)]_G ||^2_{V^{-1}}
  double variance_norm(const Target& t) const;

 private:
  WeightModel() = default;

  FeatureMap features_;
  SpanBasis basis_;
  std::vector<ObservedPair> pairs_;
  std::vector<double> proportions_;
  std::vector<double> pair_coords_;
  std::vector<double> feature_coords_;
  Eigen::MatrixXd design_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

// Minimum of sum u^2 / N over decompositions of the target difference into
// observed differences, in closed form:
//   w[p] = N[p] [diff_p]_G^T V^{-1} [target]_G,   gamma = sum w^2 / N.
struct LocalWeights {
  Target target;
  std::vector<double> weights;  // aligned with WeightModel::pairs()
  double gamma = 0.0;
};

LocalWeights local_weights(const WeightModel& model, const Target& target);

// Weights for every target (k, i, j) with i != j.
class WeightTable {
 public:
  explicit WeightTable(const WeightModel& model);

  const LocalWeights& at(int k, int i, int j) const;
  std::size_t size() const { return entries_.size(); }

 private:
  int num_actions_;
  std::vector<LocalWeights> entries_;  // dense over (k, i, j); i == j empty
};

// log(B) - log(1 - B) of the clipped first-over-second rate of each observed
// pair of the model.
std::vector<double> pair_log_odds(const SuccessRates& rates, const WeightModel& model);

// Estimated relative reward of a single target from its local weights.
double relative_reward(const WeightModel& model, std::span<const double> log_odds,
                       const Target& target);

// rhat[k * A + i] = rhat_{k,i,reference}. The fast path evaluates the global
// vector V^{-1} sum N [diff]_G logodds once and takes inner products.
std::vector<double> estimate_relative_rewards(const WeightModel& model,
                                              std::span<const double> log_odds,
                                              bool fast_path = true,
                                              int reference = 0);
std::vector<double> estimate_relative_rewards(const SuccessRates& rates,
                                              const WeightModel& model,
                                              bool fast_path = true,
                                              int reference = 0);

struct EstimateReport {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> rhat;  // S x A against reference action 0
  std::vector<int> selections;
  std::vector<std::vector<int>> tie_sets;

  double rhat_at(int k, int i) const {
    return rhat[static_cast<std::size_t>(k) * num_actions + i];
  }
};

struct Selection {
  std::vector<int> selections;
  std::vector<std::vector<int>> tie_sets;
};

// Per state, the argmax set of rhat and a uniform draw from it.
Selection select_best_actions(std::span<const double> rhat, int num_states,
                              int num_actions, std::uint64_t tie_seed);

// Estimation and selection from already-clipped rates.
EstimateReport estimate_and_select(const WeightModel& model, const SuccessRates& rates,
                                   std::uint64_t tie_seed);

// The full static pipeline on a dataset.
EstimateReport rl_low(const PreferenceDataset& data, const FeatureMap& features,
                      double reward_bound, std::uint64_t tie_seed);

}  // namespace rllow

#endif  // RLLOW_ESTIMATOR_HPP_
