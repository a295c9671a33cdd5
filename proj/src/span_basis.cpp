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

#include "rllow/span_basis.hpp"

#include <cmath>
#include <utility>

namespace rllow {

SpanBasis SpanBasis::of_observed_differences(const FeatureMap& features,
                                             const Schedule& schedule) {
  const std::vector<ObservedPair> pairs = schedule.observed();
  const int d = features.dim;
  if (pairs.empty()) {
    throw ValidationError("span basis: schedule has no observed pairs");
  }
  Eigen::MatrixXd diffs(static_cast<Eigen::Index>(pairs.size()), d);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const PairIndex& p = pairs[r].index;
    const auto a = features.row(p.state, p.first);
    const auto b = features.row(p.state, p.second);
    for (int c = 0; c < d; ++c) diffs(static_cast<Eigen::Index>(r), c) = a[c] - b[c];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? kRankTolerance * sv(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  if (rank == 0) {
    throw ValidationError("span basis: observed differences are all zero");
  }
  return SpanBasis(svd.matrixV().leftCols(rank));
}

SpanBasis SpanBasis::from_columns(Eigen::MatrixXd vectors) {
  if (vectors.cols() == 0 || vectors.cols() > vectors.rows()) {
    throw ValidationError("span basis: need 1..d basis vectors");
  }
  const Eigen::MatrixXd gram = vectors.transpose() * vectors;
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(vectors.cols(), vectors.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("span basis: columns are not orthonormal");
  }
  return SpanBasis(std::move(vectors));
}

Eigen::VectorXd SpanBasis::coordinates(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                             static_cast<Eigen::Index>(x.size()));
  return vectors_.transpose() * xv;
}

Eigen::VectorXd SpanBasis::lift(const Eigen::VectorXd& coords) const {
  return vectors_ * coords;
}

double SpanBasis::residual(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                             static_cast<Eigen::Index>(x.size()));
  return (xv - vectors_ * (vectors_.transpose() * xv)).norm();
}

bool SpanBasis::contains(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                             static_cast<Eigen::Index>(x.size()));
  return residual(x) <= 1e-9 * (1.0 + xv.norm());
}

}  // namespace rllow
