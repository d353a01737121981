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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cfaudit/error.hpp"
#include "fixtures.hpp"

namespace cfaudit {
namespace {

using testing::Categorical;
using testing::Continuous;

// Stats with hand-picked scales: MAD where given, otherwise observed range.
DatasetStats StatsWith(const FeatureSchema& s, const std::vector<double>& mads,
                       const std::vector<double>& ranges) {
  DatasetStats st;
  st.features.resize(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!s.feature(j).continuous()) continue;
    st.features[j].mad = mads[j];
    st.features[j].observed_min = 0.0;
    st.features[j].observed_max = ranges[j];
  }
  return st;
}

TEST(MixedDistanceTest, HandComputedEqualSplit) {
  const FeatureSchema s({Continuous("a", 0, 10), Continuous("b", 0, 10),
                         Categorical("c", {"r", "g", "b"}), Categorical("d", {"A", "B"})},
                        "y", {"0", "1"});
  // Scale of a is its MAD 2; b has MAD 0 so falls back to half its range, 5.
  const DatasetStats st = StatsWith(s, {2, 0, 0, 0}, {10, 10, 0, 0});
  const MixedDistance d(s, st);
  EXPECT_EQ(d.scales(), (std::vector<double>{2, 5, 0, 0}));
  // NormAbs = (3/2 + 5/5) / 2 = 1.25, SimpMat = (1 + 0) / 2 = 0.5,
  // d = 2/4 * 1.25 + 2/4 * 0.5 = 0.875.
  EXPECT_NEAR(d(Instance{{1, 3, 0, 0}}, Instance{{4, 8, 2, 0}}), 0.875, 1e-12);
  // Only categorical changes: d = 2/4 * (2/2) = 0.5.
  EXPECT_NEAR(d(Instance{{1, 3, 0, 0}}, Instance{{1, 3, 1, 1}}), 0.5, 1e-12);
}

TEST(MixedDistanceTest, HandComputedUnequalSplitIgnoresZeroScale) {
  const FeatureSchema s({Continuous("a", 0, 10), Continuous("b", 0, 10), Continuous("e", 0, 10),
                         Categorical("c", {"r", "g"})},
                        "y", {"0", "1"});
  // e is constant in the data: scale 0, never contributes.
  const DatasetStats st = StatsWith(s, {2, 4, 0, 0}, {10, 10, 0, 0});
  const MixedDistance d(s, st);
  // NormAbs = (1/2 + 2/4 + 0) / 3 = 1/3, SimpMat = 1, d = 3/4 * 1/3 + 1/4 = 0.5.
  EXPECT_NEAR(d(Instance{{0, 0, 5, 0}}, Instance{{1, 2, 9, 1}}), 0.5, 1e-12);
}

TEST(MixedDistanceTest, AllCategoricalIsMismatchFraction) {
  const FeatureSchema s({Categorical("p", {"x", "y"}), Categorical("q", {"x", "y"}),
                         Categorical("r", {"x", "y"}), Categorical("t", {"x", "y"})},
                        "y", {"0", "1"});
  const MixedDistance d(s, StatsWith(s, {0, 0, 0, 0}, {0, 0, 0, 0}));
  EXPECT_NEAR(d(Instance{{0, 0, 0, 0}}, Instance{{0, 1, 0, 0}}), 0.25, 1e-12);
}

TEST(MixedDistanceTest, AllContinuousIsMeanScaledDeviation) {
  const FeatureSchema s({Continuous("a", 0, 10), Continuous("b", 0, 10)}, "y", {"0", "1"});
  const MixedDistance d(s, StatsWith(s, {1, 2}, {10, 10}));
  // (|1-3|/1 + |0-1|/2) / 2 = 1.25
  EXPECT_NEAR(d(Instance{{1, 0}}, Instance{{3, 1}}), 1.25, 1e-12);
}

TEST(MixedDistanceTest, MetricPropertiesOnRandomInstances) {
  const Dataset data = testing::MixedDataset(100, 1);
  const MixedDistance d(data.schema, data.stats);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  for (int t = 0; t < 500; ++t) {
    const Instance& x = data.rows[pick(rng)];
    const Instance& y = data.rows[pick(rng)];
    const Instance& z = data.rows[pick(rng)];
    EXPECT_EQ(d(x, x), 0.0);
    EXPECT_EQ(d(x, y), d(y, x));
    EXPECT_GE(d(x, y), 0.0);
    EXPECT_LE(d(x, z), d(x, y) + d(y, z) + 1e-12);
  }
}

TEST(MixedDistanceTest, ArityMismatchThrows) {
  const Dataset data = testing::MixedDataset(10, 1);
  EXPECT_THROW(MixedDistanceOf(data.schema, data.stats, Instance{{1, 2}}, data.rows[0]), Error);
}

TEST(FitnessTest, InverseDistance) {
  EXPECT_EQ(Fitness(0.5), 2.0);
  EXPECT_EQ(Fitness(4.0), 0.25);
  EXPECT_EQ(Fitness(std::numeric_limits<double>::infinity()), 0.0);
  try {
    Fitness(0.0);
    FAIL() << "expected zero-distance error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDistance);
  }
  EXPECT_THROW(Fitness(-1.0), Error);
  EXPECT_THROW(Fitness(std::nan("")), Error);
}

}  // namespace
}  // namespace cfaudit
