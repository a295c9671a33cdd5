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

#include "rllow/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rllow/kernels.hpp"
#include "rllow/rng.hpp"

namespace rllow {
namespace {

std::size_t pair_slot(int num_actions, int k, int i, int j) {
  return (static_cast<std::size_t>(k) * num_actions + i) * num_actions + j;
}

void check_target(const FeatureMap& features, const Target& t) {
  if (!features.in_range(t.state, t.action) ||
      !features.in_range(t.state, t.reference)) {
    throw ValidationError("target index out of range");
  }
}

// sum_r w[r] x_r x_r^T over row-major coordinates, checked positive definite.
Eigen::MatrixXd design_from_coordinates(std::span<const double> coords, std::size_t g,
                                        std::span<const double> weights) {
  std::vector<double> gram(g * g, 0.0);
  kernels::weighted_gram(coords, g, weights, gram);
  Eigen::MatrixXd v = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                     Eigen::RowMajor>>(
      gram.data(), static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g));
  v = 0.5 * (v + v.transpose()).eval();
  const double trace = v.trace();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v, Eigen::EigenvaluesOnly);
  if (!(trace > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * trace) {
    throw NumericalError("design matrix is singular on the observed span");
  }
  return v;
}

}  // namespace

double clip_lower(double reward_bound) {
  return 1.0 / (1.0 + std::exp(2.0 * reward_bound));
}

double clip_upper(double reward_bound) {
  const double e = std::exp(2.0 * reward_bound);
  return e / (1.0 + e);
}

double clip_rate(double b, double reward_bound) {
  if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("clip_rate: rate outside [0, 1]");
  if (!(reward_bound >= 0.0)) throw ValidationError("clip_rate: L must be nonnegative");
  const double hi = clip_upper(reward_bound);
  const double lo = clip_lower(reward_bound);
  if (b > hi) return hi;
  if (b < lo) return lo;
  return b;
}

SuccessRates with_first_rates(const SuccessRates& rates,
                              std::span<const ObservedPair> pairs,
                              std::span<const double> first_rates) {
  SuccessRates out = rates;
  std::vector<double> clipped(first_rates.begin(), first_rates.end());
  kernels::clamp(clipped, clip_lower(rates.clip_bound), clip_upper(rates.clip_bound));
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const PairIndex& p = pairs[r].index;
    const std::size_t fwd = out.index(p.state, p.first, p.second);
    const std::size_t rev = out.index(p.state, p.second, p.first);
    out.raw[fwd] = first_rates[r];
    out.raw[rev] = 1.0 - first_rates[r];
    out.clipped[fwd] = clipped[r];
    out.clipped[rev] = 1.0 - clipped[r];
  }
  return out;
}

SuccessRates success_rates(const PreferenceDataset& data, const Schedule& schedule,
                           double reward_bound) {
  if (!(reward_bound >= 0.0)) throw ValidationError("success_rates: L must be nonnegative");
  const int s = schedule.num_states();
  const int a = schedule.num_actions();
  const std::size_t cells = static_cast<std::size_t>(s) * a * a;
  std::vector<std::size_t> counts(cells, 0);
  std::vector<std::size_t> wins(cells, 0);
  for (const PreferenceRecord& rec : data.records) {
    if (rec.state < 0 || rec.state >= s || rec.first < 0 || rec.second >= a ||
        rec.first >= rec.second) {
      throw ValidationError("success_rates: record outside the schedule dimensions");
    }
    const std::size_t slot = pair_slot(a, rec.state, rec.first, rec.second);
    ++counts[slot];
    if (rec.winner_is_first) ++wins[slot];
  }

  SuccessRates rates;
  rates.num_states = s;
  rates.num_actions = a;
  rates.raw.assign(cells, 0.0);
  rates.clipped.assign(cells, 0.0);
  rates.observed.assign(cells, 0);
  rates.clip_bound = reward_bound;

  const double n = static_cast<double>(data.size());
  const std::vector<ObservedPair> pairs = schedule.observed();
  std::size_t observed_count = 0;
  std::vector<double> first_rates;
  first_rates.reserve(pairs.size());
  for (const ObservedPair& pair : pairs) {
    const PairIndex& p = pair.index;
    const std::size_t slot = pair_slot(a, p.state, p.first, p.second);
    const double expected = static_cast<double>(counts[slot]) / n;
    if (counts[slot] == 0 || std::abs(expected - pair.proportion) > 1e-12) {
      throw ValidationError("success_rates: schedule does not match the dataset");
    }
    ++observed_count;
    rates.observed[slot] = 1;
    rates.observed[pair_slot(a, p.state, p.second, p.first)] = 1;
    first_rates.push_back(static_cast<double>(wins[slot]) /
                          static_cast<double>(counts[slot]));
  }
  const std::size_t nonzero = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  if (nonzero != observed_count) {
    throw ValidationError("success_rates: dataset has pairs absent from the schedule");
  }
  return with_first_rates(rates, pairs, first_rates);
}

Eigen::MatrixXd build_design_matrix(const Schedule& schedule,
                                    const FeatureMap& features,
                                    const SpanBasis& basis) {
  const std::vector<ObservedPair> pairs = schedule.observed();
  const std::size_t g = static_cast<std::size_t>(basis.rank());
  std::vector<double> coords(pairs.size() * g);
  std::vector<double> weights(pairs.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const PairIndex& p = pairs[r].index;
    const Eigen::VectorXd c =
        basis.coordinates(features.difference(p.state, p.first, p.second));
    std::copy(c.data(), c.data() + g, coords.begin() + static_cast<std::ptrdiff_t>(r * g));
    weights[r] = pairs[r].proportion;
  }
  return design_from_coordinates(coords, g, weights);
}

WeightModel WeightModel::build(const FeatureMap& features, const Schedule& schedule) {
  if (features.num_actions < 2) {
    throw ValidationError("weight model: need at least two actions");
  }
  if (schedule.observed().empty()) {
    throw InconsistencyError("no observed comparisons", PairIndex{0, 0, 1});
  }
  return build(features, schedule, SpanBasis::of_observed_differences(features, schedule));
}

WeightModel WeightModel::build(const FeatureMap& features, const Schedule& schedule,
                               SpanBasis basis) {
  if (schedule.num_states() != features.num_states ||
      schedule.num_actions() != features.num_actions) {
    throw ValidationError("weight model: schedule and features disagree on S or A");
  }
  if (basis.ambient_dim() != features.dim) {
    throw ValidationError("weight model: basis dimension differs from d");
  }
  WeightModel m;
  m.features_ = features;
  m.pairs_ = schedule.observed();
  if (m.pairs_.empty()) {
    throw InconsistencyError("no observed comparisons", PairIndex{0, 0, 1});
  }
  for (const ObservedPair& pair : m.pairs_) {
    const PairIndex& p = pair.index;
    if (!basis.contains(features.difference(p.state, p.first, p.second))) {
      throw ValidationError("weight model: basis does not span the observed differences");
    }
  }
  for (int k = 0; k < features.num_states; ++k) {
    for (int i = 1; i < features.num_actions; ++i) {
      if (!basis.contains(features.difference(k, 0, i))) {
        throw InconsistencyError("instance is not consistent: difference (" +
                                     std::to_string(k) + ",0," + std::to_string(i) +
                                     ") is outside the observed span",
                                 PairIndex{k, 0, i});
      }
    }
  }

  const std::size_t g = static_cast<std::size_t>(basis.rank());
  const std::size_t d = static_cast<std::size_t>(features.dim);
  const std::size_t sa = static_cast<std::size_t>(features.num_states) * features.num_actions;
  // Feature coordinates: row (k,i) = G^T phi(k,i). Columns of G are taken as
  // rows of G^T so the kernel sees contiguous vectors.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gt =
      basis.vectors().transpose();
  m.feature_coords_.assign(sa * g, 0.0);
  std::vector<double> column(sa);
  for (std::size_t c = 0; c < g; ++c) {
    kernels::row_dots(features.values, d,
                      std::span<const double>(gt.data() + c * d, d), column);
    for (std::size_t r = 0; r < sa; ++r) m.feature_coords_[r * g + c] = column[r];
  }

  const int a = features.num_actions;
  m.pair_coords_.resize(m.pairs_.size() * g);
  m.proportions_.resize(m.pairs_.size());
  for (std::size_t r = 0; r < m.pairs_.size(); ++r) {
    const PairIndex& p = m.pairs_[r].index;
    const double* fi = &m.feature_coords_[(static_cast<std::size_t>(p.state) * a + p.first) * g];
    const double* fj = &m.feature_coords_[(static_cast<std::size_t>(p.state) * a + p.second) * g];
    for (std::size_t c = 0; c < g; ++c) m.pair_coords_[r * g + c] = fi[c] - fj[c];
    m.proportions_[r] = m.pairs_[r].proportion;
  }

  m.design_ = design_from_coordinates(m.pair_coords_, g, m.proportions_);
  m.factor_.compute(m.design_);
  if (m.factor_.info() != Eigen::Success) {
    throw NumericalError("design matrix factorization failed");
  }
  m.basis_ = std::move(basis);
  return m;
}

Eigen::VectorXd WeightModel::solve(const Eigen::VectorXd& rhs) const {
  return factor_.solve(rhs);
}

Eigen::VectorXd WeightModel::target_coordinates(const Target& t) const {
  check_target(features_, t);
  const std::vector<double> diff = features_.difference(t.state, t.action, t.reference);
  if (!basis_.contains(diff)) {
    throw InconsistencyError("target difference is outside the observed span",
                             PairIndex{t.state, std::min(t.action, t.reference),
                                       std::max(t.action, t.reference)});
  }
  return basis_.coordinates(diff);
}

double WeightModel::variance_norm(const Target& t) const {
  const Eigen::VectorXd tc = target_coordinates(t);
  return tc.dot(solve(tc));
}

LocalWeights local_weights(const WeightModel& model, const Target& target) {
  if (target.action == target.reference) {
    throw ValidationError("local_weights: target actions must differ");
  }
  const Eigen::VectorXd direction = model.solve(model.target_coordinates(target));
  LocalWeights out;
  out.target = target;
  out.weights.resize(model.pairs().size());
  kernels::row_dots(model.pair_coordinates(), static_cast<std::size_t>(direction.size()),
                    std::span<const double>(direction.data(),
                                            static_cast<std::size_t>(direction.size())),
                    out.weights);
  const auto n = model.proportions();
  double gamma = 0.0;
  for (std::size_t r = 0; r < out.weights.size(); ++r) {
    out.weights[r] *= n[r];
    gamma += out.weights[r] * out.weights[r] / n[r];
  }
  out.gamma = gamma;
  return out;
}

WeightTable::WeightTable(const WeightModel& model) : num_actions_(model.num_actions()) {
  const int s = model.num_states();
  entries_.resize(static_cast<std::size_t>(s) * num_actions_ * num_actions_);
  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < num_actions_; ++i) {
      for (int j = 0; j < num_actions_; ++j) {
        if (i == j) continue;
        entries_[pair_slot(num_actions_, k, i, j)] = local_weights(model, Target{k, i, j});
      }
    }
  }
}

const LocalWeights& WeightTable::at(int k, int i, int j) const {
  if (i == j) throw ValidationError("weight table: no entry for i == j");
  return entries_.at(pair_slot(num_actions_, k, i, j));
}

std::vector<double> pair_log_odds(const SuccessRates& rates, const WeightModel& model) {
  if (rates.num_states != model.num_states() || rates.num_actions != model.num_actions()) {
    throw ValidationError("pair_log_odds: rates and model disagree on S or A");
  }
  std::vector<double> out;
  out.reserve(model.pairs().size());
  for (const ObservedPair& pair : model.pairs()) {
    const PairIndex& p = pair.index;
    if (!rates.is_observed(p.state, p.first, p.second)) {
      throw ValidationError("pair_log_odds: model pair has no success rate");
    }
    const double b = rates.clipped_at(p.state, p.first, p.second);
    if (!(b > 0.0 && b < 1.0)) {
      throw NumericalError("pair_log_odds: clipped rate reached 0 or 1");
    }
    out.push_back(std::log(b) - std::log1p(-b));
  }
  return out;
}

double relative_reward(const WeightModel& model, std::span<const double> log_odds,
                       const Target& target) {
  check_target(model.features(), target);
  if (target.action == target.reference) return 0.0;
  const LocalWeights w = local_weights(model, target);
  return kernels::dot(w.weights, log_odds);
}

std::vector<double> estimate_relative_rewards(const WeightModel& model,
                                              std::span<const double> log_odds,
                                              bool fast_path, int reference) {
  const int s = model.num_states();
  const int a = model.num_actions();
  if (reference < 0 || reference >= a) {
    throw ValidationError("estimate_relative_rewards: reference action out of range");
  }
  if (log_odds.size() != model.pairs().size()) {
    throw ValidationError("estimate_relative_rewards: one log-odds value per observed pair");
  }
  std::vector<double> rhat(static_cast<std::size_t>(s) * a, 0.0);
  if (!fast_path) {
    for (int k = 0; k < s; ++k) {
      for (int i = 0; i < a; ++i) {
        rhat[static_cast<std::size_t>(k) * a + i] =
            relative_reward(model, log_odds, Target{k, i, reference});
      }
    }
    return rhat;
  }

  const std::size_t g = static_cast<std::size_t>(model.basis().rank());
  const auto n = model.proportions();
  std::vector<double> scaled(log_odds.size());
  for (std::size_t r = 0; r < scaled.size(); ++r) scaled[r] = n[r] * log_odds[r];
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g));
  kernels::weighted_row_sum(model.pair_coordinates(), g, scaled,
                            std::span<double>(moment.data(), g));
  const Eigen::VectorXd global = model.solve(moment);
  std::vector<double> score(rhat.size());
  kernels::row_dots(model.feature_coordinates(), g,
                    std::span<const double>(global.data(), g), score);
  for (int k = 0; k < s; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * a;
    for (int i = 0; i < a; ++i) {
      rhat[base + i] = i == reference ? 0.0 : score[base + i] - score[base + reference];
    }
  }
  return rhat;
}

std::vector<double> estimate_relative_rewards(const SuccessRates& rates,
                                              const WeightModel& model, bool fast_path,
                                              int reference) {
  return estimate_relative_rewards(model, pair_log_odds(rates, model), fast_path, reference);
}

Selection select_best_actions(std::span<const double> rhat, int num_states,
                              int num_actions, std::uint64_t tie_seed) {
  if (rhat.size() != static_cast<std::size_t>(num_states) * num_actions || num_actions < 1) {
    throw ValidationError("select_best_actions: rhat must be S x A");
  }
  Selection out;
  out.selections.resize(static_cast<std::size_t>(num_states));
  out.tie_sets.resize(static_cast<std::size_t>(num_states));
  for (int k = 0; k < num_states; ++k) {
    const auto row = rhat.subspan(static_cast<std::size_t>(k) * num_actions,
                                  static_cast<std::size_t>(num_actions));
    const double best = *std::max_element(row.begin(), row.end());
    std::vector<int>& ties = out.tie_sets[k];
    for (int i = 0; i < num_actions; ++i) {
      if (row[i] == best) ties.push_back(i);
    }
    if (ties.size() == 1) {
      out.selections[k] = ties.front();
    } else {
      Engine engine = make_engine(tie_seed, "tie-break", {static_cast<std::uint64_t>(k)});
      std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
      out.selections[k] = ties[pick(engine)];
    }
  }
  return out;
}

EstimateReport estimate_and_select(const WeightModel& model, const SuccessRates& rates,
                                   std::uint64_t tie_seed) {
  EstimateReport report;
  report.num_states = model.num_states();
  report.num_actions = model.num_actions();
  report.rhat = estimate_relative_rewards(rates, model, /*fast_path=*/true, 0);
  Selection sel = select_best_actions(report.rhat, report.num_states,
                                      report.num_actions, tie_seed);
  report.selections = std::move(sel.selections);
  report.tie_sets = std::move(sel.tie_sets);
  return report;
}

EstimateReport rl_low(const PreferenceDataset& data, const FeatureMap& features,
                      double reward_bound, std::uint64_t tie_seed) {
  if (features.num_actions == 1) {
    EstimateReport trivial;
    trivial.num_states = features.num_states;
    trivial.num_actions = 1;
    trivial.rhat.assign(static_cast<std::size_t>(features.num_states), 0.0);
    trivial.selections.assign(static_cast<std::size_t>(features.num_states), 0);
    trivial.tie_sets.assign(static_cast<std::size_t>(features.num_states), {0});
    return trivial;
  }
  const Schedule schedule =
      empirical_proportions(data, features.num_states, features.num_actions);
  const WeightModel model = WeightModel::build(features, schedule);
  const SuccessRates rates = success_rates(data, schedule, reward_bound);
  return estimate_and_select(model, rates, tie_seed);
}

}  // namespace rllow
