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

// Label-private variant of the estimator: Gaussian noise on each observed
// success rate before clipping, with weights unchanged (they never read a
// label).

#ifndef RLLOW_DP_ESTIMATOR_HPP_
#define RLLOW_DP_ESTIMATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rllow/estimator.hpp"
#include "rllow/instance.hpp"

namespace rllow {

struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Throws ValidationError unless both parameters lie strictly inside (0, 1).
PrivacyParams validate_privacy(const PrivacyParams& privacy);

// sqrt(2 log(1.25 / delta)) / (epsilon * n * N).
double gaussian_noise_std(double n_times_proportion, const PrivacyParams& privacy);

struct PerturbedRates {
  SuccessRates rates;             // raw holds B~, clipped holds CLIP_L(B~)
  std::vector<double> noise_std;  // per observed pair, Schedule::observed() order
  std::vector<ObservedPair> pairs;
};

// One Gaussian draw per observed unordered pair, from a substream keyed by
// (seed, k, i, j); the reverse orientation is 1 - B~.
PerturbedRates gaussian_mechanism(const SuccessRates& rates, const Schedule& schedule,
                                  std::size_t n, const PrivacyParams& privacy,
                                  std::uint64_t seed);

struct SensitivityEntry {
  PairIndex pair;
  double sensitivity = 0.0;
};

// Change in B[k][i][j] caused by flipping a single label: 1 / (n N).
std::vector<SensitivityEntry> sensitivity_audit(const Schedule& schedule, std::size_t n);

struct DpReport {
  EstimateReport estimate;
  PrivacyParams privacy;
};

DpReport dp_rl_low(const PreferenceDataset& data, const FeatureMap& features,
                   double reward_bound, const PrivacyParams& privacy,
                   std::uint64_t seed, std::uint64_t tie_seed);

namespace detail {

// Returns the noise to add to a pair's rate given its calibrated std.
using NoiseSource = std::function<double(const PairIndex& pair, double stddev)>;

PerturbedRates perturb_rates(const SuccessRates& rates, const Schedule& schedule,
                             std::size_t n, const PrivacyParams& privacy,
                             const NoiseSource& noise);

// dp_rl_low with an injected noise source; tests use it for the zero-noise
// degenerate case.
DpReport dp_rl_low_with_noise(const PreferenceDataset& data, const FeatureMap& features,
                              double reward_bound, const PrivacyParams& privacy,
                              const NoiseSource& noise, std::uint64_t tie_seed);

}  // namespace detail
}  // namespace rllow

#endif  // RLLOW_DP_ESTIMATOR_HPP_
