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

// Reward-bounded maximum-likelihood baseline for the linear preference model.

#ifndef RLLOW_MLE_HPP_
#define RLLOW_MLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "rllow/estimator.hpp"
#include "rllow/instance.hpp"

namespace rllow {

struct MleFit {
  std::vector<double> theta_hat;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct MleOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;  // on the Hessian-scaled projected Newton step
};

// Maximizes sum log sigmoid(y <phi(s,first) - phi(s,second), theta>) over
// {theta : |<phi(k,i), theta>| <= L for all k, i} by projected Newton steps
// (projection in the Hessian metric) with Armijo backtracking, starting at
// zero. Throws ValidationError for an empty dataset.
MleFit mle_fit(const PreferenceDataset& data, const FeatureMap& features, double reward_bound,
               const MleOptions& options = {});

// Log-likelihood of theta on the dataset.
double mle_log_likelihood(const PreferenceDataset& data, const FeatureMap& features,
                          std::span<const double> theta);
// Gradient of the log-likelihood.
std::vector<double> mle_gradient(const PreferenceDataset& data, const FeatureMap& features,
                                 std::span<const double> theta);

// Greedy actions under theta_hat; exact ties resolved uniformly by tie_seed.
Selection mle_select(const MleFit& fit, const FeatureMap& features, std::uint64_t tie_seed);

// Appends one coordinate: features get 0, theta gets -sum(theta), so that
// <1, theta> = 0 while every reward is unchanged.
Instance zero_sum_reparam(const Instance& v);

}  // namespace rllow

#endif  // RLLOW_MLE_HPP_
