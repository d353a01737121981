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

#ifndef CFAUDIT_DISTANCE_HPP_
#define CFAUDIT_DISTANCE_HPP_

#include <functional>
#include <vector>

#include "cfaudit/dataset.hpp"
#include "cfaudit/schema.hpp"

namespace cfaudit {

// d(x, c) used as the GA objective. May return +infinity for pairs where the
// distance is undefined; the engine ranks those last and never emits them.
using DistanceFn = std::function<double(const Instance&, const Instance&)>;

// Mixed tabular distance:
//   d = (n_con/n) * NormAbs + (n_cat/n) * SimpMat
//   NormAbs = (1/n_con) * sum_j |x_j - c_j| / scale_j   (continuous j)
//   SimpMat = (1/n_cat) * sum_j [x_j != c_j]            (categorical j)
// where scale_j is the MAD with the zero-MAD fallback of DatasetStats::Scale.
class MixedDistance {
 public:
  MixedDistance(const FeatureSchema& schema, const DatasetStats& stats);

  double operator()(const Instance& x, const Instance& c) const;

  // Divisors actually applied (0 means the feature is ignored).
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<bool> continuous_;
  std::vector<double> scales_;
  std::size_t n_con_ = 0;
  std::size_t n_cat_ = 0;
};

// Convenience wrapper; throws kDimensionMismatch when x or c do not match the
// schema arity.
double MixedDistanceOf(const FeatureSchema& schema, const DatasetStats& stats,
                       const Instance& x, const Instance& c);

// 1/d. Throws kZeroDistance for d == 0 and kInvalidArgument for d < 0 or NaN.
double Fitness(double distance);

}  // namespace cfaudit

#endif  // CFAUDIT_DISTANCE_HPP_
