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

#include "rllow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rllow/estimator.hpp"
#include "rllow/kernels.hpp"

namespace rllow {
namespace {

void check_same_structure(const Instance& v, const Instance& alt) {
  if (!(v.features == alt.features) || !(v.schedule == alt.schedule) || v.rho != alt.rho ||
      v.theta.size() != alt.theta.size()) {
    throw ValidationError("instances differ in more than theta");
  }
}

double max_abs_reward(const Instance& v) {
  double out = 0.0;
  for (double r : true_rewards(v)) out = std::max(out, std::abs(r));
  return out;
}

// <phi(k,i) - phi(k,j), theta> for every observed pair.
std::vector<double> observed_relative_rewards(const Instance& v) {
  const std::vector<double> r = true_rewards(v);
  const int a = v.num_actions();
  std::vector<double> out;
  for (const ObservedPair& p : v.schedule.observed()) {
    const std::size_t base = static_cast<std::size_t>(p.index.state) * a;
    out.push_back(r[base + p.index.first] - r[base + p.index.second]);
  }
  return out;
}

}  // namespace

const PairHardness& HardnessReport::hardest() const {
  for (const PairHardness& p : pairs) {
    if (p.state == hardest_state && p.action == hardest_action) return p;
  }
  throw ValidationError("hardness report has no suboptimal pairs");
}

HardnessReport hardness(const Instance& v, std::optional<PrivacyParams> privacy) {
  if (privacy) validate_privacy(*privacy);
  const WeightModel model = WeightModel::build(v.features, v.schedule);
  const std::vector<int> best = best_actions(v);
  const std::vector<double> gaps = suboptimality_gaps(v);
  const std::span<const ObservedPair> pairs = model.pairs();

  HardnessReport out;
  out.num_states = v.num_states();
  out.num_actions = v.num_actions();
  out.privacy = privacy;
  double best_dp = 0.0;
  for (int k = 0; k < v.num_states(); ++k) {
    for (int i = 0; i < v.num_actions(); ++i) {
      if (i == best[k]) continue;
      PairHardness h;
      h.state = k;
      h.action = i;
      h.gap = gaps[static_cast<std::size_t>(k) * v.num_actions() + i];
      if (!(h.gap > 0.0)) throw ValidationError("best action is not unique in state " + std::to_string(k));
      const LocalWeights lw = local_weights(model, Target{k, i, best[k]});
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double w = lw.weights[p];
        const double n = pairs[p].proportion;
        h.gamma_tilde += std::abs(w) / std::sqrt(n);
        h.gamma_dp += (w / n) * (w / n);
        h.gamma_tilde_dp += std::abs(w) / n;
      }
      h.gamma = lw.gamma;
      h.ratio = h.gamma / (h.gap * h.gap);
      if (out.pairs.empty() || h.ratio > out.hardness) {
        out.hardness = h.ratio;
        out.hardest_state = k;
        out.hardest_action = i;
      }
      if (privacy) {
        const double dp = std::sqrt(std::log(1.25 / privacy->delta) * h.gamma_dp) /
                          (std::sqrt(privacy->epsilon) * h.gap);
        best_dp = std::max(best_dp, dp);
      }
      out.pairs.push_back(h);
    }
  }
  if (privacy) out.hardness_dp = best_dp;
  out.q_member = q_membership(out);
  return out;
}

bool q_membership(const HardnessReport& report) {
  for (const PairHardness& p : report.pairs) {
    if (p.state == report.hardest_state && p.action == report.hardest_action) continue;
    if (report.hardness < 4.0 * p.ratio) return false;
  }
  return true;
}

double d_tilde(const Instance& v, const Instance& alt) {
  check_same_structure(v, alt);
  const std::vector<double> a = observed_relative_rewards(v);
  const std::vector<double> b = observed_relative_rewards(alt);
  double total = 0.0;
  std::size_t p = 0;
  for (const ObservedPair& pair : v.schedule.observed()) {
    const double diff = a[p] - b[p];
    total += pair.proportion * diff * diff;
    ++p;
  }
  return total;
}

double bernoulli_kl(double p, double q) {
  auto term = [](double x, double y) { return x == 0.0 ? 0.0 : x * (std::log(x) - std::log(y)); };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

KlBracket kl_bracket(const Instance& v, const Instance& alt, std::size_t n) {
  const double dt = d_tilde(v, alt);
  const std::vector<double> a = observed_relative_rewards(v);
  const std::vector<double> b = observed_relative_rewards(alt);
  KlBracket out;
  std::size_t p = 0;
  for (const ObservedPair& pair : v.schedule.observed()) {
    out.exact += pair.proportion * bernoulli_kl(sigmoid(a[p]), sigmoid(b[p]));
    ++p;
  }
  const double nn = static_cast<double>(n);
  out.exact *= nn;
  out.max_abs_reward = std::max(max_abs_reward(v), max_abs_reward(alt));
  out.lower = 2.0 * nn * std::exp(-4.0 * out.max_abs_reward) * dt;
  out.upper = 2.0 * nn * std::exp(2.0 * out.max_abs_reward) * dt;
  return out;
}

AdversaryPair alt_minimizer(const Instance& v, std::span<const double> z, double eta) {
  if (z.size() != static_cast<std::size_t>(v.dim())) throw ValidationError("z has the wrong dimension");
  const WeightModel model = WeightModel::build(v.features, v.schedule);
  if (!model.basis().contains(z)) throw ValidationError("z is outside the observed span");
  const Eigen::VectorXd zg = model.basis().coordinates(z);
  const Eigen::VectorXd vz = model.solve(zg);
  const double q = zg.dot(vz);
  if (!(q > 0.0)) throw ValidationError("z must be nonzero");

  const Eigen::VectorXd step = model.basis().lift(vz) * (eta / q);
  AdversaryPair out;
  out.base = v;
  out.alt = v;
  for (int c = 0; c < v.dim(); ++c) out.alt.theta[c] += step(c);
  out.z.assign(z.begin(), z.end());
  out.eta = eta;
  out.variance_norm = q;

  const double moved = kernels::dot(z, std::span<const double>(step.data(), z.size()));
  if (std::abs(moved - eta) > 1e-9 * std::max(1.0, std::abs(eta))) {
    throw NumericalError("alternative instance misses the constraint by " +
                         std::to_string(moved - eta));
  }
  out.alt.reward_bound = std::max(v.reward_bound, max_abs_reward(out.alt));
  out.dtilde_value = d_tilde(out.base, out.alt);
  return out;
}

AdversaryReport lower_bound_adversary(const Instance& v) {
  AdversaryReport out;
  out.base_hardness = hardness(v);
  if (out.base_hardness.pairs.empty()) throw ValidationError("instance has no suboptimal action");
  const PairHardness& top = out.base_hardness.hardest();
  const std::vector<int> best = best_actions(v);
  out.state = top.state;
  out.action = top.action;
  out.base_best = best[top.state];

  const std::vector<double> z = v.features.difference(top.state, top.action, out.base_best);
  out.pair = alt_minimizer(v, z, 2.0 * top.gap);
  const Instance& alt = out.pair.alt;

  const std::vector<double> r_alt = true_rewards(alt);
  const int a = v.num_actions();
  out.alt_gap = r_alt[static_cast<std::size_t>(top.state) * a + top.action] -
                r_alt[static_cast<std::size_t>(top.state) * a + out.base_best];

  // Strict argmax per state under the alternative; -1 marks a tie.
  std::vector<int> alt_best(static_cast<std::size_t>(v.num_states()), -1);
  for (int k = 0; k < v.num_states(); ++k) {
    const auto first = r_alt.begin() + static_cast<std::ptrdiff_t>(k) * a;
    const int arg = static_cast<int>(std::max_element(first, first + a) - first);
    const bool unique = std::count(first, first + a, first[arg]) == 1;
    alt_best[k] = unique ? arg : -1;
  }
  out.hardest_becomes_optimal = alt_best[top.state] == top.action;
  out.flips_only_hardest_state = out.hardest_becomes_optimal;
  for (int k = 0; k < v.num_states(); ++k) {
    if (k != top.state && alt_best[k] != best[k]) out.flips_only_hardest_state = false;
  }

  if (out.flips_only_hardest_state) {
    out.alt_hardness = hardness(alt);
    const double h = out.base_hardness.hardness;
    const double h_alt = out.alt_hardness.hardness;
    const double slack = 1e-9 * h;
    out.hardness_within_band = h_alt >= h - slack && h_alt <= 8.0 * h + slack;
  }
  return out;
}

std::vector<EnvelopeRow> regret_envelopes(const Instance& v, std::span<const std::size_t> n_grid,
                                          std::optional<PrivacyParams> privacy) {
  const HardnessReport report = hardness(v, privacy);
  double stat = 0.0;
  double dp = 0.0;
  for (const PairHardness& p : report.pairs) {
    stat += v.rho[p.state] * (std::sqrt(p.gamma) + p.gamma_tilde);
    dp += v.rho[p.state] * (std::sqrt(p.gamma_dp) + p.gamma_tilde_dp);
  }
  std::vector<EnvelopeRow> rows;
  for (std::size_t n : n_grid) {
    if (n == 0) throw ValidationError("envelope sample sizes must be positive");
    EnvelopeRow row;
    row.n = n;
    const double nn = static_cast<double>(n);
    row.statistical = stat / std::sqrt(nn);
    if (privacy) {
      row.privacy = dp * std::sqrt(std::log(1.25 / privacy->delta)) / (privacy->epsilon * nn);
    }
    row.total = row.statistical + row.privacy;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rllow
