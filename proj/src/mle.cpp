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

#include "rllow/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <Eigen/Dense>

#include "rllow/kernels.hpp"

namespace rllow {
namespace {

// Records collapsed to one row per compared pair.
struct PairCounts {
  Eigen::MatrixXd diffs;  // m x d
  Eigen::VectorXd wins;
  Eigen::VectorXd losses;
};

PairCounts collapse(const PreferenceDataset& data, const FeatureMap& features) {
  std::map<std::tuple<int, int, int>, std::pair<double, double>> counts;
  for (const PreferenceRecord& r : data.records) {
    if (!features.in_range(r.state, r.first) || !features.in_range(r.state, r.second) ||
        r.first >= r.second) {
      throw ValidationError("dataset record out of range or not ordered");
    }
    auto& c = counts[{r.state, r.first, r.second}];
    (r.winner_is_first ? c.first : c.second) += 1.0;
  }
  PairCounts out;
  const auto m = static_cast<Eigen::Index>(counts.size());
  out.diffs.resize(m, features.dim);
  out.wins.resize(m);
  out.losses.resize(m);
  Eigen::Index row = 0;
  for (const auto& [key, c] : counts) {
    const auto [k, i, j] = key;
    const std::vector<double> diff = features.difference(k, i, j);
    for (int col = 0; col < features.dim; ++col) out.diffs(row, col) = diff[col];
    out.wins(row) = c.first;
    out.losses(row) = c.second;
    ++row;
  }
  return out;
}

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_likelihood(const PairCounts& pc, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd margin = pc.diffs * theta;
  double total = 0.0;
  for (Eigen::Index p = 0; p < margin.size(); ++p) {
    total -= pc.wins(p) * softplus(-margin(p)) + pc.losses(p) * softplus(margin(p));
  }
  return total;
}

Eigen::VectorXd gradient(const PairCounts& pc, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd margin = pc.diffs * theta;
  Eigen::VectorXd coef(margin.size());
  for (Eigen::Index p = 0; p < margin.size(); ++p) {
    const double s = sigmoid(margin(p));
    coef(p) = pc.wins(p) * (1.0 - s) - pc.losses(p) * s;
  }
  return pc.diffs.transpose() * coef;
}

// Curvature of the negative log-likelihood.
Eigen::MatrixXd curvature(const PairCounts& pc, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd margin = pc.diffs * theta;
  Eigen::VectorXd w(margin.size());
  for (Eigen::Index p = 0; p < margin.size(); ++p) {
    const double s = sigmoid(margin(p));
    w(p) = (pc.wins(p) + pc.losses(p)) * s * (1.0 - s);
  }
  const auto m = static_cast<std::size_t>(margin.size());
  const auto d = static_cast<std::size_t>(pc.diffs.cols());
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = pc.diffs;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h =
      Eigen::MatrixXd::Zero(pc.diffs.cols(), pc.diffs.cols());
  kernels::weighted_gram({rows.data(), m * d}, d, {w.data(), m}, {h.data(), d * d});
  Eigen::MatrixXd out = h;
  const double ridge = 1e-4 * (out.trace() / static_cast<double>(d) + 1.0);
  out.diagonal().array() += ridge;
  return 0.5 * (out + out.transpose());
}

// Projection of u onto {|<a_r, theta>| <= L} in the metric of h, by
// Dykstra's alternating projections over the slabs.
Eigen::VectorXd project(const Eigen::VectorXd& u, const Eigen::MatrixXd& slabs, double bound,
                        const Eigen::MatrixXd& h) {
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  const Eigen::MatrixXd dirs = llt.solve(slabs.transpose());  // H^{-1} a_r per column
  const Eigen::Index m = slabs.rows();
  Eigen::VectorXd scale(m);
  for (Eigen::Index r = 0; r < m; ++r) scale(r) = slabs.row(r).dot(dirs.col(r));

  Eigen::VectorXd x = u;
  Eigen::MatrixXd corrections = Eigen::MatrixXd::Zero(u.size(), m);
  for (int sweep = 0; sweep < 20000; ++sweep) {
    const Eigen::VectorXd before = x;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (scale(r) <= 0.0) continue;
      const Eigen::VectorXd y = x + corrections.col(r);
      const double value = slabs.row(r).dot(y);
      const double clamped = std::clamp(value, -bound, bound);
      const Eigen::VectorXd next = y - dirs.col(r) * ((value - clamped) / scale(r));
      corrections.col(r) = y - next;
      x = next;
    }
    if ((x - before).lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
  }
  // Dykstra leaves rounding-level violations; pull back toward the origin,
  // which is always feasible.
  const double worst = (slabs * x).cwiseAbs().maxCoeff();
  if (worst > bound && worst > 0.0) x *= bound / worst;
  return x;
}

Eigen::MatrixXd slab_rows(const FeatureMap& features) {
  const int rows = features.num_states * features.num_actions;
  Eigen::MatrixXd out(rows, features.dim);
  for (int k = 0; k < features.num_states; ++k) {
    for (int i = 0; i < features.num_actions; ++i) {
      const auto row = features.row(k, i);
      for (int c = 0; c < features.dim; ++c) out(k * features.num_actions + i, c) = row[c];
    }
  }
  return out;
}

}  // namespace

double mle_log_likelihood(const PreferenceDataset& data, const FeatureMap& features,
                          std::span<const double> theta) {
  const PairCounts pc = collapse(data, features);
  return log_likelihood(pc, Eigen::Map<const Eigen::VectorXd>(theta.data(), features.dim));
}

std::vector<double> mle_gradient(const PreferenceDataset& data, const FeatureMap& features,
                                 std::span<const double> theta) {
  const PairCounts pc = collapse(data, features);
  const Eigen::VectorXd g =
      gradient(pc, Eigen::Map<const Eigen::VectorXd>(theta.data(), features.dim));
  return {g.data(), g.data() + g.size()};
}

MleFit mle_fit(const PreferenceDataset& data, const FeatureMap& features, double reward_bound,
               const MleOptions& options) {
  if (data.records.empty()) throw ValidationError("MLE needs a nonempty dataset");
  if (!(reward_bound > 0.0)) throw ValidationError("MLE needs a positive reward bound");
  const PairCounts pc = collapse(data, features);
  const Eigen::MatrixXd slabs = slab_rows(features);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(features.dim);
  double value = log_likelihood(pc, theta);
  MleFit fit;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    fit.iterations = iter + 1;
    const Eigen::VectorXd g = gradient(pc, theta);
    const Eigen::MatrixXd h = curvature(pc, theta);
    const Eigen::VectorXd newton = theta + h.llt().solve(g);
    const Eigen::VectorXd step = project(newton, slabs, reward_bound, h) - theta;
    // Scaled step: equals the gradient norm at interior points.
    const double residual = (h * step).norm();
    if (residual <= options.tolerance) {
      fit.converged = true;
      break;
    }
    const double slope = g.dot(step);
    double t = 1.0;
    double candidate = value;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      candidate = log_likelihood(pc, theta + t * step);
      if (candidate >= value + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    if (!(candidate >= value)) {
      // No ascent left at machine precision.
      fit.converged = true;
      break;
    }
    theta += t * step;
    value = candidate;
  }
  if (!std::isfinite(value)) throw NumericalError("MLE log-likelihood is not finite");
  fit.theta_hat.assign(theta.data(), theta.data() + theta.size());
  fit.log_likelihood = value;
  return fit;
}

Selection mle_select(const MleFit& fit, const FeatureMap& features, std::uint64_t tie_seed) {
  if (fit.theta_hat.size() != static_cast<std::size_t>(features.dim)) {
    throw ValidationError("theta_hat has the wrong dimension");
  }
  std::vector<double> scores(static_cast<std::size_t>(features.num_states) * features.num_actions);
  kernels::row_dots(features.values, static_cast<std::size_t>(features.dim), fit.theta_hat, scores);
  return select_best_actions(scores, features.num_states, features.num_actions, tie_seed);
}

Instance zero_sum_reparam(const Instance& v) {
  Instance out = v;
  const int d = v.dim();
  out.features = FeatureMap(v.num_states(), v.num_actions(), d + 1);
  for (int k = 0; k < v.num_states(); ++k) {
    for (int i = 0; i < v.num_actions(); ++i) {
      std::copy_n(v.features.row(k, i).begin(), d, out.features.row(k, i).begin());
    }
  }
  double total = 0.0;
  for (double t : v.theta) total += t;
  out.theta.push_back(-total);
  return out;
}

}  // namespace rllow
