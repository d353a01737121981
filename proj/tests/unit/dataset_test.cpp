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

#include "cfaudit/dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cfaudit/error.hpp"
#include "fixtures.hpp"

namespace cfaudit {
namespace {

using testing::Categorical;
using testing::Continuous;

FeatureSchema TwoFeatureSchema() {
  return FeatureSchema({Continuous("x", 0, 10), Categorical("c", {"A", "B"})}, "y", {"0", "1"});
}

Dataset Parse(const std::string& text, const FeatureSchema& schema) {
  std::istringstream in(text);
  return ParseCsv(in, schema);
}

std::string ErrorMessage(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(CsvTest, LoadsRowsAndStats) {
  const Dataset d = Parse("x,c,y\n1,A,0\n2,B,0\n4,A,1\n9,A,1\n", TwoFeatureSchema());
  ASSERT_EQ(d.size(), 4u);
  EXPECT_EQ(d.labels, (std::vector<std::size_t>{0, 0, 1, 1}));
  EXPECT_EQ(d.rows[1].values, (std::vector<double>{2, 1}));
  // x = {1,2,4,9}: median 3, deviations {2,1,1,6} -> MAD 1.5.
  EXPECT_EQ(d.stats.features[0].median, 3.0);
  EXPECT_EQ(d.stats.features[0].mad, 1.5);
  EXPECT_EQ(d.stats.features[0].observed_min, 1.0);
  EXPECT_EQ(d.stats.features[0].observed_max, 9.0);
  EXPECT_EQ(d.stats.features[1].category_frequency, (std::vector<double>{0.75, 0.25}));
  EXPECT_EQ(d.stats.class_priors, (std::vector<double>{0.5, 0.5}));
}

TEST(CsvTest, ColumnOrderFollowsHeader) {
  const Dataset d = Parse("y,c,x\n1,B,3\n0,A,2\n", TwoFeatureSchema());
  EXPECT_EQ(d.rows[0].values, (std::vector<double>{3, 1}));
  EXPECT_EQ(d.labels[0], 1u);
}

TEST(CsvTest, HandlesQuotesBomAndCrlf) {
  const FeatureSchema s({Continuous("x", 0, 10), Categorical("c", {"a,b", "q\"t"})}, "y",
                        {"0", "1"});
  const Dataset d = Parse("\xEF\xBB\xBFx,c,y\r\n1,\"a,b\",0\r\n2,\"q\"\"t\",1\r\n", s);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.rows[0][1], 0.0);
  EXPECT_EQ(d.rows[1][1], 1.0);
}

TEST(CsvTest, UnknownCategoryNamesRow) {
  const std::string msg = ErrorMessage(
      [] { Parse("x,c,y\n1,A,0\n2,Z,1\n", TwoFeatureSchema()); });
  // Row indices are 0-based over data rows, matching `explain --row`.
  EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("Z"), std::string::npos) << msg;
}

TEST(CsvTest, RejectsMissingValuesOutOfRangeAndMissingColumns) {
  EXPECT_NE(ErrorMessage([] { Parse("x,c,y\n,A,0\n", TwoFeatureSchema()); }).find("row 0"),
            std::string::npos);
  EXPECT_NE(ErrorMessage([] { Parse("x,c,y\n1,A,0\n11,A,0\n", TwoFeatureSchema()); })
                .find("row 1"),
            std::string::npos);
  EXPECT_THROW(Parse("x,y\n1,0\n", TwoFeatureSchema()), Error);
  EXPECT_THROW(Parse("x,c,y\n1,A,7\n", TwoFeatureSchema()), Error);
  EXPECT_THROW(Parse("x,c,y\n1,A\n", TwoFeatureSchema()), Error);
  EXPECT_THROW(Parse("x,c,y\n", TwoFeatureSchema()), Error);
}

TEST(CsvTest, WriteThenParseIsIdentity) {
  const Dataset d = testing::MixedDataset(40, 3);
  std::ostringstream out;
  WriteCsv(out, d);
  std::istringstream in(out.str());
  const Dataset back = ParseCsv(in, d.schema);
  EXPECT_EQ(back.rows, d.rows);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(CsvTest, PimaFormatFixtureHas768Rows) {
  const FeatureSchema s = LoadSchema(std::string(CFAUDIT_DATA_DIR) + "/pima.schema.json");
  const Dataset d = LoadCsv(std::string(CFAUDIT_DATA_DIR) + "/pima_synthetic.csv", s);
  EXPECT_EQ(d.size(), 768u);
  EXPECT_EQ(d.schema.size(), 8u);
  EXPECT_EQ(d.schema.classes().size(), 2u);
}

TEST(StatsTest, ScaleFallsBackToHalfRangeThenZero) {
  // Column 0 is mostly constant (MAD 0) with one outlier; column 1 constant.
  const FeatureSchema s({Continuous("a", 0, 10), Continuous("b", 0, 10)}, "y", {"0", "1"});
  const Dataset d = MakeDataset(
      s, {Instance{{2, 5}}, Instance{{2, 5}}, Instance{{2, 5}}, Instance{{8, 5}}}, {0, 0, 1, 1});
  EXPECT_EQ(d.stats.features[0].mad, 0.0);
  EXPECT_EQ(d.stats.Scale(0), 3.0);
  EXPECT_EQ(d.stats.Scale(1), 0.0);
}

// Independent recomputation of the mixed distance from the raw definition.
double OracleDistance(const FeatureSchema& s, const DatasetStats& st, const Instance& x,
                      const Instance& c) {
  double con = 0.0, cat = 0.0;
  std::size_t n_con = 0, n_cat = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s.feature(j).continuous()) {
      ++n_con;
      const double scale = st.Scale(j);
      if (scale > 0.0) con += std::abs(x[j] - c[j]) / scale;
    } else {
      ++n_cat;
      cat += x[j] != c[j] ? 1.0 : 0.0;
    }
  }
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  if (n_con) d += (n_con / n) * (con / n_con);
  if (n_cat) d += (n_cat / n) * (cat / n_cat);
  return d;
}

TEST(StatsTest, IntraClassDistanceMatchesAllPairsOracle) {
  const Dataset d = testing::MixedDataset(120, 11);
  for (std::size_t k = 0; k < 2; ++k) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (i == j || d.labels[i] != k || d.labels[j] != k) continue;
        sum += OracleDistance(d.schema, d.stats, d.rows[i], d.rows[j]);
        ++pairs;
      }
    }
    EXPECT_NEAR(d.stats.intra_class_distance[k], sum / pairs, 1e-12);
    EXPECT_FALSE(d.stats.intra_class_sampled[k]);
  }
}

TEST(StatsTest, SingletonClassHasZeroIntraDistance) {
  const Dataset d = Parse("x,c,y\n1,A,0\n2,B,0\n4,A,1\n", TwoFeatureSchema());
  EXPECT_EQ(d.stats.intra_class_distance[1], 0.0);
  EXPECT_GT(d.stats.intra_class_distance[0], 0.0);
}

TEST(StatsTest, InvariantUnderRowPermutation) {
  const Dataset d = testing::MixedDataset(200, 5);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
    std::vector<Instance> rows;
    std::vector<std::size_t> labels;
    for (std::size_t i : order) {
      rows.push_back(d.rows[i]);
      labels.push_back(d.labels[i]);
    }
    const DatasetStats st = ComputeStats(rows, labels, d.schema);
    EXPECT_EQ(st.intra_class_distance, d.stats.intra_class_distance);
    EXPECT_EQ(st.class_priors, d.stats.class_priors);
    for (std::size_t j = 0; j < d.schema.size(); ++j) {
      EXPECT_EQ(st.features[j].mad, d.stats.features[j].mad);
      EXPECT_EQ(st.features[j].median, d.stats.features[j].median);
    }
  }
}

TEST(StatsTest, LargeClassesAreSampledWithStandardError) {
  const Dataset d = testing::MixedDataset(2 * kExactPairLimit + 600, 9);
  bool any_sampled = false;
  for (std::size_t k = 0; k < 2; ++k) {
    if (!d.stats.intra_class_sampled[k]) continue;
    any_sampled = true;
    EXPECT_GT(d.stats.intra_class_stderr[k], 0.0);
    EXPECT_LT(d.stats.intra_class_stderr[k], 0.01 * d.stats.intra_class_distance[k]);
  }
  EXPECT_TRUE(any_sampled);
}

}  // namespace
}  // namespace cfaudit
