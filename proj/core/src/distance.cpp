/*
 * Copyright 2026 The cfaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cfaudit/distance.hpp"

#include <cmath>
#include <string>

#include "cfaudit/error.hpp"

namespace cfaudit {

MixedDistance::MixedDistance(const FeatureSchema& schema, const DatasetStats& stats) {
  if (stats.features.size() != schema.size()) {
    Fail(ErrorCode::kDimensionMismatch, "dataset statistics do not match the schema");
  }
  continuous_.resize(schema.size());
  scales_.assign(schema.size(), 0.0);
  for (std::size_t j = 0; j < schema.size(); ++j) {
    continuous_[j] = schema.feature(j).continuous();
    if (continuous_[j]) {
      scales_[j] = stats.Scale(j);
      ++n_con_;
    } else {
      ++n_cat_;
    }
  }
}

double MixedDistance::operator()(const Instance& x, const Instance& c) const {
  const std::size_t n = continuous_.size();
  if (x.size() != n || c.size() != n) {
    Fail(ErrorCode::kDimensionMismatch,
         "instance arity does not match schema (" + std::to_string(n) + ")");
  }
  double abs_sum = 0.0;
  double mismatches = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (continuous_[j]) {
      if (scales_[j] > 0.0) abs_sum += std::fabs(x[j] - c[j]) / scales_[j];
    } else if (x[j] != c[j]) {
      mismatches += 1.0;
    }
  }
  const double nd = static_cast<double>(n);
  double d = 0.0;
  if (n_con_ > 0) {
    const double norm_abs = abs_sum / static_cast<double>(n_con_);
    d += (static_cast<double>(n_con_) / nd) * norm_abs;
  }
  if (n_cat_ > 0) {
    const double simp_mat = mismatches / static_cast<double>(n_cat_);
    d += (static_cast<double>(n_cat_) / nd) * simp_mat;
  }
  return d;
}

double MixedDistanceOf(const FeatureSchema& schema, const DatasetStats& stats,
                       const Instance& x, const Instance& c) {
  return MixedDistance(schema, stats)(x, c);
}

double Fitness(double distance) {
  if (std::isnan(distance) || distance < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "distance must be non-negative");
  }
  if (distance == 0.0) {
    Fail(ErrorCode::kZeroDistance, "zero distance: candidate equals the input");
  }
  return 1.0 / distance;
}

}  // namespace cfaudit
