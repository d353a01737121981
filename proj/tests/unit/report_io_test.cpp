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

#include "cfaudit/report_io.hpp"

#include <gtest/gtest.h>

#include "expect.hpp"
#include "fixtures.hpp"

namespace cfaudit {
namespace {

using nlohmann::json;
using testing::CodeOf;
using testing::MixedSchema;

CounterfactualResult SampleResult() {
  CounterfactualResult r;
  r.input = Instance{{30, 25, 1, 0}};
  r.input_class = 0;
  Counterfactual cf;
  cf.values = Instance{{45.5, 25, 2, 0}};
  cf.distance = 0.25;
  cf.fitness = 4.0;
  cf.predicted_class = 1;
  cf.changes = {{0, 30, 45.5}, {2, 1, 2}};
  r.counterfactuals.push_back(cf);
  r.warnings = {"shortfall: found 1 of 2 requested counterfactuals with distinct changes"};
  r.generations_run = 12;
  return r;
}

TEST(CounterfactualJsonTest, WireForm) {
  const json doc = CounterfactualResultToJson(MixedSchema(), SampleResult());
  EXPECT_EQ(doc.at("input"), json::parse(R"([30.0, 25.0, "south", "a"])"));
  EXPECT_EQ(doc.at("input_class"), "deny");
  const json& cf = doc.at("counterfactuals").at(0);
  EXPECT_EQ(cf.at("class"), "approve");
  EXPECT_EQ(cf.at("distance"), 0.25);
  EXPECT_EQ(cf.at("changed"), json::parse(R"([{"feature":"income","from":30.0,"to":45.5},
                                               {"feature":"region","from":"south","to":"east"}])"));
  EXPECT_EQ(doc.at("generations"), 12);
}

TEST(CounterfactualJsonTest, RoundTrip) {
  const FeatureSchema s = MixedSchema();
  const CounterfactualResult in = SampleResult();
  const CounterfactualResult out =
      CounterfactualResultFromJson(s, CounterfactualResultToJson(s, in));
  EXPECT_EQ(out.input, in.input);
  EXPECT_EQ(out.input_class, in.input_class);
  ASSERT_EQ(out.counterfactuals.size(), 1u);
  EXPECT_EQ(out.counterfactuals[0].values, in.counterfactuals[0].values);
  EXPECT_EQ(out.counterfactuals[0].predicted_class, 1u);
  ASSERT_EQ(out.counterfactuals[0].changes.size(), 2u);
  EXPECT_EQ(out.counterfactuals[0].changes[1].to, 2.0);
  EXPECT_EQ(out.warnings, in.warnings);
  EXPECT_EQ(CounterfactualResultToJson(s, out), CounterfactualResultToJson(s, in));
}

TEST(CounterfactualJsonTest, MalformedDocumentsAreParseErrors) {
  const FeatureSchema s = MixedSchema();
  json doc = CounterfactualResultToJson(s, SampleResult());
  doc["input_class"] = "maybe";
  EXPECT_EQ(CodeOf([&] { CounterfactualResultFromJson(s, doc); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([&] { CounterfactualResultFromJson(s, json::object()); }), ErrorCode::kParse);
}

TEST(ReportJsonTest, Robustness) {
  RobustnessReport r = CerScore(std::vector<double>{1, 3});
  r.ncerscore = 0.5;
  r.rows = {4, 9};
  const json doc = RobustnessReportToJson(r);
  EXPECT_EQ(doc.at("cerscore"), 2.0);
  EXPECT_EQ(doc.at("ci95").size(), 2u);
  EXPECT_EQ(doc.at("ncerscore"), 0.5);
  EXPECT_EQ(doc.at("sample").at("instances"), 2);
  r.ci95.reset();
  r.ncerscore.reset();
  EXPECT_TRUE(RobustnessReportToJson(r).at("ci95").is_null());
  EXPECT_TRUE(RobustnessReportToJson(r).at("ncerscore").is_null());
}

TEST(ReportJsonTest, FairnessAndImportance) {
  IndividualFairnessResult f;
  f.instance_id = "12";
  f.protected_features = {"race", "gender"};
  f.fitness_muted = 0.63;
  f.fitness_unmuted = 0.87;
  f.delta = 0.24;
  const json doc = IndividualFairnessToJson(f);
  EXPECT_EQ(doc.at("delta"), 0.24);
  EXPECT_TRUE(doc.at("errors").empty());
  EXPECT_EQ(FairnessLine(f),
            "instance 12  protected race,gender  FitnessM 0.6300  FitnessU 0.8700  delta 0.2400");
  f.fitness_unmuted.reset();
  f.delta.reset();
  f.unmuted_error = "no counterfactual";
  EXPECT_EQ(FairnessLine(f),
            "instance 12  protected race,gender  FitnessM 0.6300  FitnessU n/a (no counterfactual)");

  ImportanceReport imp;
  imp.features = {"a", "b"};
  imp.counts = {1, 4};
  imp.total = 4;
  const json idoc = ImportanceReportToJson(imp);
  EXPECT_EQ(idoc.at("features").at(0).at("feature"), "b");
  EXPECT_EQ(ImportanceTable(imp),
            "feature  changes  share\n"
            "-------  -------  -----\n"
            "b        4        1.000\n"
            "a        1        0.250\n"
            "counterfactuals: 4, failures: 0\n");
}

TEST(ReportTextTest, TableLayout) {
  EXPECT_EQ(RenderTable({"a", "value"}, {{"long cell", "1"}, {"x", ""}}),
            "a          value\n"
            "---------  -----\n"
            "long cell  1\n"
            "x\n");
}

TEST(ReportTextTest, BurdenCsvQuotesKeys) {
  BurdenReport r;
  r.grouping = {"race", "gender"};
  GroupBurden g;
  g.key = "race=Black,gender=F";
  g.size = 3;
  g.burden = 0.3;
  r.groups.push_back(g);
  GroupBurden omitted;
  omitted.key = "race=Other,gender=M";
  omitted.size = 2;
  omitted.failures = 2;
  r.groups.push_back(omitted);
  EXPECT_EQ(BurdenCsv(r),
            "group,size,burden,failures\n"
            "\"race=Black,gender=F\",3,0.3,0\n"
            "\"race=Other,gender=M\",2,,2\n");
  EXPECT_NE(BurdenTable(r).find("n/a"), std::string::npos);
  EXPECT_EQ(BurdenReportToJson(r).at("groups").at(1).at("burden"), nullptr);
}

TEST(ReportTextTest, CounterfactualTableListsChanges) {
  const std::string text = CounterfactualTable(MixedSchema(), SampleResult());
  EXPECT_NE(text.find("input class: deny"), std::string::npos);
  EXPECT_NE(text.find("explanation 1: class approve, distance 0.2500, fitness 4.0000"),
            std::string::npos);
  EXPECT_NE(text.find("region   south  east"), std::string::npos);
  EXPECT_NE(text.find("warning: shortfall"), std::string::npos);
  EXPECT_EQ(FormatFixed(1.0 / 3.0, 2), "0.33");
}

}  // namespace
}  // namespace cfaudit
