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

#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

namespace rllow::testing {

Instance t1() {
  Instance v;
  v.features = FeatureMap(1, 2, 1);
  v.features.row(0, 0)[0] = 1.0;
  v.features.row(0, 1)[0] = 0.0;
  v.theta = {1.0};
  v.rho = {1.0};
  v.schedule = Schedule(1, 2);
  v.schedule.set(0, 0, 1, 1.0);
  v.reward_bound = 1.0;
  return v;
}

Instance t2(double rho_first) {
  Instance v;
  v.features = FeatureMap(2, 2, 1);
  for (int k = 0; k < 2; ++k) v.features.row(k, 0)[0] = 1.0;
  v.theta = {1.0};
  v.rho = {rho_first, 1.0 - rho_first};
  v.schedule = Schedule(2, 2);
  v.schedule.set(0, 0, 1, 0.2);
  v.schedule.set(1, 0, 1, 0.8);
  v.reward_bound = 1.0;
  return v;
}

Eigen::MatrixXd observed_difference_matrix(const FeatureMap& features, const Schedule& schedule) {
  const std::vector<ObservedPair> pairs = schedule.observed();
  Eigen::MatrixXd d(features.dim, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& idx = pairs[p].index;
    for (int c = 0; c < features.dim; ++c) {
      d(c, static_cast<Eigen::Index>(p)) =
          features.row(idx.state, idx.first)[c] - features.row(idx.state, idx.second)[c];
    }
  }
  return d;
}

bool in_span_least_squares(const Eigen::MatrixXd& d, const Eigen::VectorXd& x) {
  if (d.cols() == 0) return x.norm() <= 1e-9;
  const Eigen::VectorXd coef = d.colPivHouseholderQr().solve(x);
  return (d * coef - x).norm() <= 1e-9 * (1.0 + x.norm());
}

bool consistent_least_squares(const FeatureMap& features, const Schedule& schedule) {
  const Eigen::MatrixXd d = observed_difference_matrix(features, schedule);
  for (int k = 0; k < features.num_states; ++k) {
    for (int i = 0; i < features.num_actions; ++i) {
      for (int j = i + 1; j < features.num_actions; ++j) {
        const std::vector<double> diff = features.difference(k, i, j);
        if (!in_span_least_squares(d, Eigen::Map<const Eigen::VectorXd>(diff.data(), features.dim))) {
          return false;
        }
      }
    }
  }
  return true;
}

Instance random_consistent_instance(Engine& rng, const RandomInstanceOptions& opt) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const int s = std::uniform_int_distribution<int>(1, opt.max_states)(rng);
    const int a = std::uniform_int_distribution<int>(2, opt.max_actions)(rng);
    const int d = std::uniform_int_distribution<int>(1, opt.max_dim)(rng);
    Instance v;
    v.features = FeatureMap(s, a, d);
    for (double& x : v.features.values) x = gauss(rng);
    v.theta.resize(static_cast<std::size_t>(d));
    for (double& x : v.theta) x = gauss(rng);
    v.rho.resize(static_cast<std::size_t>(s));
    double rho_total = 0.0;
    for (double& x : v.rho) rho_total += (x = 0.1 + unit(rng));
    for (double& x : v.rho) x /= rho_total;
    v.schedule = Schedule(s, a);
    std::vector<std::array<int, 3>> chosen;
    std::vector<double> weight;
    for (int k = 0; k < s; ++k) {
      for (int i = 0; i < a; ++i) {
        for (int j = i + 1; j < a; ++j) {
          if (unit(rng) < opt.observe_probability) {
            chosen.push_back({k, i, j});
            weight.push_back(0.05 + unit(rng));
          }
        }
      }
    }
    if (chosen.empty()) continue;
    double total = 0.0;
    for (double w : weight) total += w;
    for (std::size_t p = 0; p < chosen.size(); ++p) {
      v.schedule.set(chosen[p][0], chosen[p][1], chosen[p][2], weight[p] / total);
    }
    if (std::abs(v.schedule.total() - 1.0) > 1e-12) continue;
    double max_abs = 0.0;
    for (double r : true_rewards(v)) max_abs = std::max(max_abs, std::abs(r));
    v.reward_bound = max_abs;
    if (!consistent_least_squares(v.features, v.schedule)) continue;
    try {
      return validate_instance(v);
    } catch (const ValidationError&) {
      continue;
    }
  }
}

std::vector<double> kkt_weights(const FeatureMap& features, const Schedule& schedule,
                                const Target& target) {
  const Eigen::MatrixXd d = observed_difference_matrix(features, schedule);
  const std::vector<ObservedPair> pairs = schedule.observed();
  const Eigen::Index m = d.cols();
  const Eigen::Index dim = d.rows();
  // [ 2 diag(1/N)  D^T ] [u]   [0]
  // [ D            0   ] [l] = [t]
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + dim, m + dim);
  for (Eigen::Index p = 0; p < m; ++p) kkt(p, p) = 2.0 / pairs[static_cast<std::size_t>(p)].proportion;
  kkt.block(0, m, m, dim) = d.transpose();
  kkt.block(m, 0, dim, m) = d;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + dim);
  const std::vector<double> t = features.difference(target.state, target.action, target.reference);
  for (Eigen::Index c = 0; c < dim; ++c) rhs(m + c) = t[static_cast<std::size_t>(c)];
  const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  return {sol.data(), sol.data() + m};
}

double exact_t1_regret(std::size_t n) {
  const double p = 1.0 / (1.0 + std::exp(-1.0));
  double total = 0.0;
  for (std::size_t x = 0; x <= n; ++x) {
    const double log_pmf = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(x) + 1) -
                           std::lgamma(static_cast<double>(n - x) + 1) + static_cast<double>(x) * std::log(p) +
                           static_cast<double>(n - x) * std::log1p(-p);
    const double pmf = std::exp(log_pmf);
    if (2 * x < n) total += pmf;
    if (2 * x == n) total += 0.5 * pmf;
  }
  return total;
}

std::vector<double> cesaro_average(const TransitionKernel& kernel, const Policy& policy,
                                   const std::vector<double>& rho, std::size_t steps) {
  const int s = kernel.num_states;
  std::vector<double> x = rho, sum(static_cast<std::size_t>(s), 0.0), next(static_cast<std::size_t>(s));
  for (std::size_t t = 0; t < steps; ++t) {
    for (int k = 0; k < s; ++k) sum[k] += x[k];
    std::fill(next.begin(), next.end(), 0.0);
    for (int k = 0; k < s; ++k) {
      for (int to = 0; to < s; ++to) next[to] += x[k] * kernel(k, policy[k], to);
    }
    x.swap(next);
  }
  for (double& v : sum) v /= static_cast<double>(steps);
  return sum;
}

SuccessRates planted_rates(const Instance& v) {
  const std::vector<double> r = true_rewards(v);
  const int a = v.num_actions();
  SuccessRates rates;
  rates.num_states = v.num_states();
  rates.num_actions = a;
  const std::size_t size = static_cast<std::size_t>(rates.num_states) * a * a;
  rates.raw.assign(size, 0.0);
  rates.clipped.assign(size, 0.0);
  rates.observed.assign(size, 0);
  rates.clip_bound = v.reward_bound;
  for (const ObservedPair& p : v.schedule.observed()) {
    const auto [k, i, j] = p.index;
    const double b = sigmoid(r[static_cast<std::size_t>(k) * a + i] - r[static_cast<std::size_t>(k) * a + j]);
    rates.raw[rates.index(k, i, j)] = rates.clipped[rates.index(k, i, j)] = b;
    rates.raw[rates.index(k, j, i)] = rates.clipped[rates.index(k, j, i)] = 1.0 - b;
    rates.observed[rates.index(k, i, j)] = rates.observed[rates.index(k, j, i)] = 1;
  }
  return rates;
}

// Flat Dirichlet rows, with a third of the rows made deterministic so that
// reducible and periodic chains show up. Rows are kept away from tiny
// positive entries: those mix too slowly for the time-average oracle.
TransitionKernel random_kernel(Engine& rng, int s, int a) {
  std::exponential_distribution<double> g(1.0);
  std::uniform_int_distribution<int> pick(0, s - 1);
  std::uniform_int_distribution<int> coin(0, 2);
  TransitionKernel p{s, a, std::vector<double>(static_cast<std::size_t>(s) * a * s, 0.0)};
  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < a; ++i) {
      double* row = p.probs.data() + (static_cast<std::size_t>(k) * a + i) * s;
      if (coin(rng) == 0) {
        row[pick(rng)] = 1.0;
        continue;
      }
      double total = 0.0;
      for (int n = 0; n < s; ++n) total += (row[n] = g(rng));
      for (int n = 0; n < s; ++n) row[n] /= total;
    }
  }
  return p;
}

std::vector<double> random_simplex(Engine& rng, int s) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> x(static_cast<std::size_t>(s));
  for (double& e : x) e = u(rng);
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& e : x) e /= total;
  return x;
}

}  // namespace rllow::testing
