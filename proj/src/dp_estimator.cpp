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

#include "rllow/dp_estimator.hpp"

#include <cmath>
#include <random>

#include "rllow/rng.hpp"

namespace rllow {

PrivacyParams validate_privacy(const PrivacyParams& privacy) {
  if (!(privacy.epsilon > 0.0 && privacy.epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  if (!(privacy.delta > 0.0 && privacy.delta < 1.0)) {
    throw ValidationError("delta must lie in (0, 1)");
  }
  return privacy;
}

double gaussian_noise_std(double n_times_proportion, const PrivacyParams& privacy) {
  return std::sqrt(2.0 * std::log(1.25 / privacy.delta)) /
         (privacy.epsilon * n_times_proportion);
}

namespace detail {

PerturbedRates perturb_rates(const SuccessRates& rates, const Schedule& schedule,
                             std::size_t n, const PrivacyParams& privacy,
                             const NoiseSource& noise) {
  validate_privacy(privacy);
  if (n == 0) throw ValidationError("gaussian_mechanism: n must be positive");
  PerturbedRates out;
  out.pairs = schedule.observed();
  std::vector<double> first_rates;
  first_rates.reserve(out.pairs.size());
  out.noise_std.reserve(out.pairs.size());
  for (const ObservedPair& pair : out.pairs) {
    const PairIndex& p = pair.index;
    if (!rates.is_observed(p.state, p.first, p.second)) {
      throw ValidationError("gaussian_mechanism: schedule pair has no success rate");
    }
    const double stddev = gaussian_noise_std(static_cast<double>(n) * pair.proportion, privacy);
    out.noise_std.push_back(stddev);
    first_rates.push_back(rates.raw_at(p.state, p.first, p.second) + noise(p, stddev));
  }
  out.rates = with_first_rates(rates, out.pairs, first_rates);
  return out;
}

DpReport dp_rl_low_with_noise(const PreferenceDataset& data, const FeatureMap& features,
                              double reward_bound, const PrivacyParams& privacy,
                              const NoiseSource& noise, std::uint64_t tie_seed) {
  validate_privacy(privacy);
  const Schedule schedule =
      empirical_proportions(data, features.num_states, features.num_actions);
  const WeightModel model = WeightModel::build(features, schedule);
  const SuccessRates rates = success_rates(data, schedule, reward_bound);
  const PerturbedRates perturbed = perturb_rates(rates, schedule, data.size(), privacy, noise);
  return DpReport{estimate_and_select(model, perturbed.rates, tie_seed), privacy};
}

}  // namespace detail

namespace {

detail::NoiseSource gaussian_source(std::uint64_t seed) {
  return [seed](const PairIndex& p, double stddev) {
    Engine engine = make_engine(seed, "dp-noise",
                                {static_cast<std::uint64_t>(p.state),
                                 static_cast<std::uint64_t>(p.first),
                                 static_cast<std::uint64_t>(p.second)});
    std::normal_distribution<double> normal(0.0, stddev);
    return normal(engine);
  };
}

}  // namespace

PerturbedRates gaussian_mechanism(const SuccessRates& rates, const Schedule& schedule,
                                  std::size_t n, const PrivacyParams& privacy,
                                  std::uint64_t seed) {
  return detail::perturb_rates(rates, schedule, n, privacy, gaussian_source(seed));
}

std::vector<SensitivityEntry> sensitivity_audit(const Schedule& schedule, std::size_t n) {
  if (n == 0) throw ValidationError("sensitivity_audit: n must be positive");
  std::vector<SensitivityEntry> out;
  for (const ObservedPair& pair : schedule.observed()) {
    out.push_back({pair.index, 1.0 / (static_cast<double>(n) * pair.proportion)});
  }
  return out;
}

DpReport dp_rl_low(const PreferenceDataset& data, const FeatureMap& features,
                   double reward_bound, const PrivacyParams& privacy,
                   std::uint64_t seed, std::uint64_t tie_seed) {
  return detail::dp_rl_low_with_noise(data, features, reward_bound, privacy,
                                      gaussian_source(seed), tie_seed);
}

}  // namespace rllow
