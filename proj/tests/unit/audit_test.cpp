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

#include "cfaudit/audit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "expect.hpp"
#include "fixtures.hpp"

namespace cfaudit {
namespace {

using testing::CodeOf;
using testing::MixedDataset;
using testing::MixedPredictor;

TEST(CerScoreTest, SingleDistanceHasNoInterval) {
  const std::vector<double> d = {0.5};
  const RobustnessReport r = CerScore(d);
  EXPECT_EQ(r.cerscore, 0.5);
  EXPECT_FALSE(r.ci95);
}

TEST(CerScoreTest, ConstantListHasZeroWidth) {
  const std::vector<double> d = {1, 1, 1};
  const RobustnessReport r = CerScore(d);
  EXPECT_EQ(r.cerscore, 1.0);
  ASSERT_TRUE(r.ci95);
  EXPECT_EQ(r.ci95->lo, 1.0);
  EXPECT_EQ(r.ci95->hi, 1.0);
}

TEST(CerScoreTest, MatchesHandComputation) {
  const std::vector<double> d = {1, 2, 3, 4};
  const RobustnessReport r = CerScore(d);
  // mean 2.5, sample variance 5/3.
  const double half = 1.96 * std::sqrt(5.0 / 3.0) / 2.0;
  EXPECT_NEAR(r.cerscore, 2.5, 1e-12);
  EXPECT_NEAR(r.ci95->lo, 2.5 - half, 1e-12);
  EXPECT_NEAR(r.ci95->hi, 2.5 + half, 1e-12);
}

TEST(CerScoreTest, ScalesLinearly) {
  const std::vector<double> d = {0.3, 0.7, 1.1, 0.25, 0.9};
  std::vector<double> scaled;
  for (double v : d) scaled.push_back(3.0 * v);
  const RobustnessReport a = CerScore(d);
  const RobustnessReport b = CerScore(scaled);
  EXPECT_NEAR(b.cerscore, 3.0 * a.cerscore, 1e-12);
  EXPECT_NEAR(b.ci95->hi - b.ci95->lo, 3.0 * (a.ci95->hi - a.ci95->lo), 1e-12);
}

TEST(CerScoreTest, RejectsBadInput) {
  EXPECT_EQ(CodeOf([] { CerScore(std::vector<double>{}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { CerScore(std::vector<double>{1, 0}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { CerScore(std::vector<double>{1, NAN}); }), ErrorCode::kInvalidArgument);
}

TEST(NcerScoreTest, NormalizesByExpectedIntraClassDistance) {
  const std::vector<double> priors = {0.5, 0.5};
  const std::vector<double> intra = {0.2, 0.6};
  EXPECT_NEAR(NcerScore(0.2, priors, intra), 0.5, 1e-12);
  const std::vector<double> zero = {0, 0};
  EXPECT_THROW(NcerScore(0.2, priors, zero), Error);
  const std::vector<double> short_list = {0.2};
  EXPECT_THROW(NcerScore(0.2, priors, short_list), Error);
}

TEST(BurdenTest, MeanAndUnion) {
  EXPECT_NEAR(Burden(std::vector<double>{0.2, 0.4}), 0.3, 1e-12);
  const std::vector<double> a = {0.1, 0.5, 0.9};
  const std::vector<double> b = {2.0, 4.0};
  std::vector<double> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const double expected = (3 * Burden(a) + 2 * Burden(b)) / 5;
  EXPECT_NEAR(Burden(both), expected, 1e-12);
}

TEST(ImportanceReportTest, RanksByCountThenIndex) {
  ImportanceReport r;
  r.features = {"a", "b", "c", "d"};
  r.counts = {3, 7, 3, 0};
  EXPECT_EQ(r.Ranking(), (std::vector<std::size_t>{1, 0, 2, 3}));
}

class AuditTest : public ::testing::Test {
 protected:
  AuditTest() : data_(MixedDataset(200, 3)), distance_(data_.schema, data_.stats) {
    options_.ga.generations = 40;
    options_.ga.seed = 11;
  }

  Dataset data_;
  MixedDistance distance_;
  std::shared_ptr<Predictor> f_ = MixedPredictor();
  AuditOptions options_;
};

TEST_F(AuditTest, RobustnessSamplesPerClass) {
  RobustnessSampling s;
  s.per_class = 5;
  s.seed = 2;
  const RobustnessReport r = AuditRobustness(*f_, data_, distance_, s, options_);
  EXPECT_EQ(r.classes_sampled, 2u);
  EXPECT_EQ(r.distances.size(), 10u);
  EXPECT_EQ(r.rows.size(), 10u);
  EXPECT_EQ(r.skipped_misclassified, 0u);
  for (double d : r.distances) EXPECT_GT(d, 0.0);
  const double mean = std::accumulate(r.distances.begin(), r.distances.end(), 0.0) / 10.0;
  EXPECT_NEAR(r.cerscore, mean, 1e-12);
  ASSERT_TRUE(r.ncerscore);
  EXPECT_NEAR(*r.ncerscore, NcerScore(r.cerscore, data_.stats), 1e-12);
}

TEST_F(AuditTest, RobustnessIgnoresThreadCount) {
  RobustnessSampling s;
  s.per_class = 4;
  s.seed = 5;
  options_.threads = 1;
  const RobustnessReport one = AuditRobustness(*f_, data_, distance_, s, options_);
  options_.threads = 4;
  const RobustnessReport four = AuditRobustness(*f_, data_, distance_, s, options_);
  EXPECT_EQ(one.rows, four.rows);
  EXPECT_EQ(one.distances, four.distances);
}

TEST_F(AuditTest, RobustnessSkipsMisclassifiedRows) {
  // Flip the ground truth of every row: all predictions are now wrong.
  Dataset flipped = data_;
  for (std::size_t& l : flipped.labels) l = 1 - l;
  RobustnessSampling s;
  s.per_class = 3;
  EXPECT_EQ(CodeOf([&] { AuditRobustness(*f_, flipped, distance_, s, options_); }),
            ErrorCode::kInfeasibleSpace);
  s.only_correct = false;
  const RobustnessReport r = AuditRobustness(*f_, flipped, distance_, s, options_);
  EXPECT_EQ(r.distances.size(), 6u);
}

TEST_F(AuditTest, RobustnessOnConstantModelIsInfeasible) {
  const FunctionPredictor constant({"deny", "approve"},
                                   [](const Instance&) -> std::size_t { return 1; });
  RobustnessSampling s;
  s.per_class = 3;
  s.only_correct = false;
  EXPECT_EQ(CodeOf([&] { AuditRobustness(constant, data_, distance_, s, options_); }),
            ErrorCode::kInfeasibleSpace);
}

TEST_F(AuditTest, RobustnessHonoursCandidateRows) {
  RobustnessSampling s;
  s.per_class = 50;
  s.candidate_rows = {0, 1, 2, 3, 4, 5, 6, 7};
  const RobustnessReport r = AuditRobustness(*f_, data_, distance_, s, options_);
  for (std::size_t row : r.rows) EXPECT_LT(row, 8u);
  EXPECT_LE(r.distances.size(), 8u);
}

TEST_F(AuditTest, BurdenGroupsUnfavorableInstances) {
  BurdenOptions b;
  b.group_by = {"group"};
  const BurdenReport r = AuditBurden(*f_, data_, distance_, b, options_);
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_EQ(r.groups[0].key, "group=a");
  EXPECT_EQ(r.groups[1].key, "group=b");
  std::size_t denied = 0;
  for (const Instance& x : data_.rows) denied += f_->Predict(x) == 0 ? 1 : 0;
  EXPECT_EQ(r.audited, denied);
  EXPECT_EQ(r.groups[0].size + r.groups[1].size, denied);
  for (const GroupBurden& g : r.groups) {
    ASSERT_TRUE(g.burden);
    EXPECT_NEAR(*g.burden, Burden(g.distances), 1e-12);
  }
}

TEST_F(AuditTest, BurdenValidatesOptions) {
  BurdenOptions b;
  EXPECT_EQ(CodeOf([&] { AuditBurden(*f_, data_, distance_, b, options_); }),
            ErrorCode::kValidation);
  b.group_by = {"zip"};
  EXPECT_EQ(CodeOf([&] { AuditBurden(*f_, data_, distance_, b, options_); }),
            ErrorCode::kValidation);
}

TEST_F(AuditTest, BurdenReportsGroupsWithoutCounterfactuals) {
  // Only group b can ever be approved, and group is immutable.
  const FunctionPredictor f({"deny", "approve"}, [](const Instance& x) -> std::size_t {
    return x[3] == 1 && x[0] >= 50 ? 1 : 0;
  });
  BurdenOptions b;
  b.group_by = {"group"};
  b.filter = OutcomeFilter::kAll;
  const BurdenReport r = AuditBurden(f, data_, distance_, b, options_);
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_FALSE(r.groups[0].burden);
  EXPECT_EQ(r.groups[0].failures, r.groups[0].size);
  EXPECT_TRUE(r.groups[1].burden);
  EXPECT_FALSE(r.notes.empty());
}

TEST_F(AuditTest, FairnessWithIgnoredFeatureMatches) {
  options_.ga.generations = 150;
  const Instance x{{30, 25, 1, 0}};  // denied
  const IndividualFairnessResult r =
      AuditIndividualFairness(*f_, data_.schema, distance_, x, {"region"}, options_, "7");
  ASSERT_TRUE(r.fitness_muted && r.fitness_unmuted);
  EXPECT_LT(std::abs(*r.delta), 0.1 * *r.fitness_muted);
  EXPECT_EQ(r.instance_id, "7");
  EXPECT_DOUBLE_EQ(*r.delta, *r.fitness_unmuted - *r.fitness_muted);
}

TEST_F(AuditTest, FairnessWithEmptyOrImmutableProtectedSet) {
  const Instance x{{30, 25, 1, 0}};
  const auto none = AuditIndividualFairness(*f_, data_.schema, distance_, x, {}, options_);
  EXPECT_EQ(*none.delta, 0.0);
  const auto immutable =
      AuditIndividualFairness(*f_, data_.schema, distance_, x, {"group"}, options_);
  EXPECT_EQ(*immutable.fitness_muted, *immutable.fitness_unmuted);
}

TEST_F(AuditTest, FairnessRejectsFavorableInput) {
  const Instance x{{90, 5, 1, 0}};
  EXPECT_EQ(CodeOf([&] {
              AuditIndividualFairness(*f_, data_.schema, distance_, x, {"region"}, options_);
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([&] {
              AuditIndividualFairness(*f_, data_.schema, distance_, Instance{{30, 25, 1, 0}},
                                      {"nope"}, options_);
            }),
            ErrorCode::kValidation);
}

TEST_F(AuditTest, ImportanceFindsTheOnlyUsedFeature) {
  const FunctionPredictor f({"deny", "approve"},
                            [](const Instance& x) -> std::size_t { return x[0] >= 50 ? 1 : 0; });
  std::vector<std::size_t> rows(30);
  std::iota(rows.begin(), rows.end(), 0);
  const ImportanceReport r = AuditFeatureImportance(f, data_, distance_, options_, rows);
  EXPECT_EQ(r.total, 30u);
  EXPECT_EQ(r.counts[0], 30u);
  EXPECT_EQ(r.Ranking().front(), 0u);
  EXPECT_EQ(r.counts[3], 0u);  // immutable
}

}  // namespace
}  // namespace cfaudit
