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

#include "cfaudit/constraints.hpp"

#include <gtest/gtest.h>

#include "expect.hpp"
#include "fixtures.hpp"

namespace cfaudit {
namespace {

using nlohmann::json;
using testing::CodeOf;
using testing::MixedSchema;

TEST(ConstraintsTest, PatchSetsAndClearsOverrides) {
  const FeatureSchema s = MixedSchema();
  Constraints c = ApplyConstraintPatch(
      s, {}, json::parse(R"({"income":{"range":[10,60]},"region":{"allowed":["south","east"]},
                            "debt":{"muted":true}})"));
  EXPECT_EQ(c.ranges.at(0), (std::pair<double, double>{10, 60}));
  EXPECT_EQ(c.allowed.at(2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(c.muted, (std::set<std::size_t>{1}));

  c = ApplyConstraintPatch(
      s, c, json::parse(R"({"income":{"range":null},"debt":{"muted":false}})"));
  EXPECT_TRUE(c.ranges.empty());
  EXPECT_TRUE(c.muted.empty());
  EXPECT_EQ(c.allowed.size(), 1u);
}

TEST(ConstraintsTest, InvalidPatchesLeaveInputUntouched) {
  const FeatureSchema s = MixedSchema();
  const Constraints base =
      ApplyConstraintPatch(s, {}, json::parse(R"({"income":{"range":[10,60]}})"));
  const Constraints copy = base;
  for (const char* bad : {
           R"({"salary":{"muted":true}})",
           R"({"income":{"range":[-5,60]}})",
           R"({"income":{"range":[60,10]}})",
           R"({"income":{"range":[1]}})",
           R"({"region":{"range":[0,1]}})",
           R"({"income":{"allowed":["x"]}})",
           R"({"region":{"allowed":["west"]}})",
           R"({"region":{"allowed":[]}})",
           R"({"debt":{"muted":"yes"}})",
           R"({"debt":{"frozen":true}})",
           R"({"debt":true})",
           R"([1,2])",
       }) {
    EXPECT_EQ(CodeOf([&] { ApplyConstraintPatch(s, base, json::parse(bad)); }),
              ErrorCode::kValidation)
        << bad;
  }
  EXPECT_EQ(base, copy);
}

TEST(ConstraintsTest, OutOfBoundsMessageNamesFeature) {
  const FeatureSchema s = MixedSchema();
  try {
    ApplyConstraintPatch(s, {}, json::parse(R"({"debt":{"range":[0,80]}})"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("debt"), std::string::npos);
  }
}

TEST(ConstraintsTest, SteppedRangeMustHoldAGridValue) {
  const FeatureSchema s({testing::Stepped("age", 18, 90, 1)}, "y", {"0", "1"});
  Constraints c;
  c.ranges[0] = {54.4, 54.7};
  EXPECT_EQ(CodeOf([&] { ValidateConstraints(s, c); }), ErrorCode::kValidation);
  c.ranges[0] = {54.4, 55.0};
  EXPECT_NO_THROW(ValidateConstraints(s, c));
}

TEST(ConstraintsTest, EffectiveMutedAddsImmutableFeatures) {
  const FeatureSchema s = MixedSchema();
  Constraints c;
  c.muted = {0};
  EXPECT_EQ(EffectiveMuted(s, c), (std::set<std::size_t>{0, 3}));
  EXPECT_FALSE(AllFeaturesMuted(s, c));
  c = WithMuted(s, c, {"debt", "region"});
  EXPECT_TRUE(AllFeaturesMuted(s, c));
  EXPECT_EQ(CodeOf([&] { WithMuted(s, c, {"nope"}); }), ErrorCode::kValidation);
}

TEST(ConstraintsTest, JsonRoundTrip) {
  const FeatureSchema s = MixedSchema();
  const json patch = json::parse(
      R"({"income":{"range":[10,60]},"region":{"allowed":["north"]},"debt":{"muted":true}})");
  const Constraints c = ApplyConstraintPatch(s, {}, patch);
  EXPECT_EQ(ConstraintsToJson(s, c), patch);
  EXPECT_EQ(ApplyConstraintPatch(s, {}, ConstraintsToJson(s, c)), c);
  EXPECT_EQ(ConstraintsToJson(s, {}), json::object());
}

TEST(ConstraintsTest, ValidatesTargetAndK) {
  const FeatureSchema s = MixedSchema();
  Constraints c;
  c.target = 2;
  EXPECT_EQ(CodeOf([&] { ValidateConstraints(s, c); }), ErrorCode::kValidation);
  c.target = 1;
  c.k = 0;
  EXPECT_EQ(CodeOf([&] { ValidateConstraints(s, c); }), ErrorCode::kValidation);
  c.k = 3;
  EXPECT_NO_THROW(ValidateConstraints(s, c));
}

}  // namespace
}  // namespace cfaudit
