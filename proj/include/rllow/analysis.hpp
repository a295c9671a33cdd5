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

// Instance hardness, worst-case coefficients, the squared relative-reward
// divergence between two instances and the lower-bound adversary.

#ifndef RLLOW_ANALYSIS_HPP_
#define RLLOW_ANALYSIS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rllow/dp_estimator.hpp"
#include "rllow/instance.hpp"

namespace rllow {

// Coefficients of one suboptimal (state, action), all computed from the
// local weights targeted at (k, i, best action of k).
struct PairHardness {
  int state = 0;
  int action = 0;
  double gap = 0.0;
  double gamma = 0.0;           // sum w^2 / N
  double gamma_tilde = 0.0;     // sum |w| / sqrt(N)
  double gamma_dp = 0.0;        // sum (w / N)^2
  double gamma_tilde_dp = 0.0;  // sum |w| / N
  double ratio = 0.0;           // gamma / gap^2
};

struct HardnessReport {
  int num_states = 0;
  int num_actions = 0;
  std::vector<PairHardness> pairs;  // suboptimal pairs in (k, i) order
  double hardness = 0.0;
  int hardest_state = 0;
  int hardest_action = 0;
  bool q_member = false;
  std::optional<PrivacyParams> privacy;
  std::optional<double> hardness_dp;

  const PairHardness& hardest() const;
};

// Throws InconsistencyError for inconsistent instances. The attaining pair
// is the first maximum in (k, i) order.
HardnessReport hardness(const Instance& v, std::optional<PrivacyParams> privacy = {});

// True iff the hardest ratio is at least 4x every other suboptimal ratio.
bool q_membership(const HardnessReport& report);

// sum N (<phi(k,i) - phi(k,j), theta - theta'>)^2 over observed pairs.
double d_tilde(const Instance& v, const Instance& alt);

struct KlBracket {
  double exact = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double max_abs_reward = 0.0;

  bool holds() const { return lower <= exact && exact <= upper; }
};

// Exact KL between the label distributions of n samples and the
// 2n e^{-4R} D, 2n e^{2R} D bracket, R the largest absolute reward under
// either instance. The lower side only holds once R is moderately large
// (about 0.87), so containment is reported rather than enforced.
KlBracket kl_bracket(const Instance& v, const Instance& alt, std::size_t n);

// Bernoulli KL divergence d(p || q).
double bernoulli_kl(double p, double q);

struct AdversaryPair {
  Instance base;
  Instance alt;
  std::vector<double> z;
  double eta = 0.0;
  double dtilde_value = 0.0;
  double variance_norm = 0.0;  // || [z]_G ||^2_{V^{-1}}
};

// Closest instance (in D) to v among those with <z, theta' - theta> = eta:
//   theta' = theta + eta / ||[z]_G||^2_{V^{-1}} * G V^{-1} [z]_G.
// Throws ValidationError when z is outside the observed span or zero, and
// NumericalError if the constraint residual exceeds 1e-9.
AdversaryPair alt_minimizer(const Instance& v, std::span<const double> z, double eta);

struct AdversaryReport {
  AdversaryPair pair;
  HardnessReport base_hardness;
  HardnessReport alt_hardness;
  int state = 0;        // hardest state
  int action = 0;       // hardest action, optimal under the alternative
  int base_best = 0;    // optimal action of that state under v
  bool flips_only_hardest_state = false;
  bool hardest_becomes_optimal = false;
  double alt_gap = 0.0;  // r'(action) - r'(base_best)
  bool hardness_within_band = false;  // H <= H' <= 8H
};

// Alternative instance along z = phi(k, i) - phi(k, i*_k) with eta = 2 gap at
// the hardest pair. The structural properties are reported as flags; they
// are guaranteed only for Q-members.
AdversaryReport lower_bound_adversary(const Instance& v);

struct EnvelopeRow {
  std::size_t n = 0;
  double statistical = 0.0;  // sum rho (sqrt gamma + gamma_tilde) / sqrt n
  double privacy = 0.0;      // sum rho (sqrt gamma_dp + gamma_tilde_dp) sqrt(ln(1.25/delta)) / (eps n)
  double total = 0.0;
};

// Unit-constant worst-case regret envelopes over a grid of sample sizes.
std::vector<EnvelopeRow> regret_envelopes(const Instance& v, std::span<const std::size_t> n_grid,
                                          std::optional<PrivacyParams> privacy = {});

}  // namespace rllow

#endif  // RLLOW_ANALYSIS_HPP_
