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

#include "cfaudit/schema.hpp"

#include <gtest/gtest.h>

#include "cfaudit/error.hpp"
#include "fixtures.hpp"

namespace cfaudit {
namespace {

using nlohmann::json;
using testing::Continuous;

const char* kSchemaText = R"({
  "features": [
    {"name": "glucose", "kind": "continuous", "min": 0, "max": 300, "mutable": true},
    {"name": "bmi", "kind": "continuous", "min": 10, "max": 70},
    {"name": "race", "kind": "categorical", "categories": ["A", "B"], "mutable": false}
  ],
  "target": {"name": "outcome", "classes": ["0", "1"], "favorable": "0"}
})";

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInternal;
}

TEST(SchemaTest, ParsesArity) {
  const FeatureSchema s = SchemaFromJson(json::parse(kSchemaText));
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.num_continuous(), 2u);
  EXPECT_EQ(s.num_categorical(), 1u);
  EXPECT_EQ(s.classes(), (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(s.favorable_class(), 0u);
  EXPECT_EQ(s.FeatureIndex("bmi"), 1u);
  EXPECT_FALSE(s.FeatureIndex("age").has_value());
}

TEST(SchemaTest, MutabilityPassesThrough) {
  const FeatureSchema s = SchemaFromJson(json::parse(kSchemaText));
  EXPECT_FALSE(s.feature(2).is_mutable);
  EXPECT_TRUE(s.feature(1).is_mutable);  // default
}

TEST(SchemaTest, JsonRoundTrip) {
  const FeatureSchema s = SchemaFromJson(json::parse(kSchemaText));
  EXPECT_EQ(SchemaFromJson(SchemaToJson(s)), s);
}

TEST(SchemaTest, RejectsInvalidBounds) {
  EXPECT_EQ(CodeOf([] { FeatureSchema({Continuous("x", 5, 1)}, "y", {"0", "1"}); }),
            ErrorCode::kValidation);
}

TEST(SchemaTest, RejectsStructuralProblems) {
  auto bad = [](const char* text) {
    return CodeOf([text] { SchemaFromJson(json::parse(text)); });
  };
  EXPECT_EQ(bad(R"({"features":[{"name":"a","kind":"continuous","min":0,"max":1},
                                {"name":"a","kind":"continuous","min":0,"max":1}],
                    "target":{"name":"y","classes":["0","1"]}})"),
            ErrorCode::kValidation);
  EXPECT_EQ(bad(R"({"features":[{"name":"a","kind":"categorical","categories":[]}],
                    "target":{"name":"y","classes":["0","1"]}})"),
            ErrorCode::kValidation);
  EXPECT_EQ(bad(R"({"features":[{"name":"a","kind":"continuous","min":0,"max":1}],
                    "target":{"name":"y","classes":["0"]}})"),
            ErrorCode::kValidation);
  EXPECT_EQ(bad(R"({"features":[{"name":"a","kind":"continuous","min":0,"max":1}],
                    "target":{"name":"y","classes":["0","1"],"favorable":"2"}})"),
            ErrorCode::kValidation);
  EXPECT_EQ(bad(R"({"features":[{"name":"a","kind":"ordinal"}],
                    "target":{"name":"y","classes":["0","1"]}})"),
            ErrorCode::kParse);
  EXPECT_EQ(bad(R"({"features":[]})"), ErrorCode::kParse);
}

TEST(SchemaTest, MissingFileIsNotFound) {
  EXPECT_EQ(CodeOf([] { LoadSchema("/nonexistent/schema.json"); }), ErrorCode::kNotFound);
}

TEST(InstanceTest, WireFormatRoundTrip) {
  const FeatureSchema s = SchemaFromJson(json::parse(kSchemaText));
  const Instance x = InstanceFromJson(s, json::parse(R"([115.0, 31.5, "B"])"));
  EXPECT_EQ(x.values, (std::vector<double>{115.0, 31.5, 1.0}));
  EXPECT_EQ(InstanceToJson(s, x), json::parse(R"([115.0, 31.5, "B"])"));
}

TEST(InstanceTest, ReportsFieldLevelProblems) {
  const FeatureSchema s = SchemaFromJson(json::parse(kSchemaText));
  std::vector<std::string> problems;
  EXPECT_FALSE(InstanceFromJson(s, json::parse(R"([400, "x", "Z"])"), &problems));
  ASSERT_EQ(problems.size(), 3u);
  EXPECT_NE(problems[0].find("glucose"), std::string::npos);
  EXPECT_NE(problems[1].find("bmi"), std::string::npos);
  EXPECT_NE(problems[2].find("race"), std::string::npos);

  problems.clear();
  EXPECT_FALSE(InstanceFromJson(s, json::parse("[1, 2]"), &problems));
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("expected 3 values"), std::string::npos);
  EXPECT_THROW(InstanceFromJson(s, json::parse("[1, 2]")), Error);
}

TEST(SnapToGridTest, SnapsInsideBounds) {
  const FeatureSpec f = testing::Stepped("k", 0, 10, 2.5);
  EXPECT_EQ(SnapToGrid(f, 3.6, 0, 10), 2.5);
  EXPECT_EQ(SnapToGrid(f, 3.8, 0, 10), 5.0);
  EXPECT_EQ(SnapToGrid(f, 11.0, 0, 10), 10.0);
  // Range [1, 6] admits grid points 2.5 and 5 only.
  EXPECT_EQ(SnapToGrid(f, 0.2, 1, 6), 2.5);
  EXPECT_EQ(SnapToGrid(f, 5.9, 1, 6), 5.0);
  const FeatureSpec plain = Continuous("x", 0, 1);
  EXPECT_EQ(SnapToGrid(plain, 0.123, 0, 1), 0.123);
}

TEST(FormatValueTest, ShortestRoundTrip) {
  const FeatureSchema s = SchemaFromJson(json::parse(kSchemaText));
  EXPECT_EQ(FormatValue(s.feature(0), 115.0), "115");
  EXPECT_EQ(FormatValue(s.feature(1), 0.1), "0.1");
  EXPECT_EQ(FormatValue(s.feature(2), 0.0), "A");
}

}  // namespace
}  // namespace cfaudit
