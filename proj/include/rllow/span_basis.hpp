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

#ifndef RLLOW_SPAN_BASIS_HPP_
#define RLLOW_SPAN_BASIS_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rllow/instance.hpp"

namespace rllow {

// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-9;

// Orthonormal basis G of a subspace of R^d, with the coordinate map
// x -> G^T x and its lift c -> G c.
class SpanBasis {
 public:
  // Empty basis of rank 0.
  SpanBasis() = default;

  // Basis of Span{phi(k,i) - phi(k,j) : N[k][i][j] > 0}, via SVD of the
  // stacked observed differences. Throws ValidationError for an empty
  // schedule.
  static SpanBasis of_observed_differences(const FeatureMap& features,
                                           const Schedule& schedule);

  // Takes the columns of `vectors` (d x g) as the basis. Throws
  // ValidationError unless they are orthonormal within 1e-12.
  static SpanBasis from_columns(Eigen::MatrixXd vectors);

  int ambient_dim() const { return static_cast<int>(vectors_.rows()); }
  int rank() const { return static_cast<int>(vectors_.cols()); }
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  Eigen::VectorXd coordinates(std::span<const double> x) const;
  Eigen::VectorXd lift(const Eigen::VectorXd& coords) const;
  // || x - G G^T x ||
  double residual(std::span<const double> x) const;
  // residual <= 1e-9 * (1 + ||x||)
  bool contains(std::span<const double> x) const;

 private:
  explicit SpanBasis(Eigen::MatrixXd vectors) : vectors_(std::move(vectors)) {}

  Eigen::MatrixXd vectors_;
};

}  // namespace rllow

#endif  // RLLOW_SPAN_BASIS_HPP_
