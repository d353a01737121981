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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cfaudit/distance.hpp"
#include "cfaudit/error.hpp"
#include "cfaudit/robust_stats.hpp"

namespace cfaudit {

double DatasetStats::Scale(std::size_t feature) const {
  const FeatureStats& fs = features.at(feature);
  if (fs.mad > 0.0) return fs.mad;
  if (fs.range() > 0.0) return 0.5 * fs.range();
  return 0.0;
}

double DatasetStats::ExpectedIntraClassDistance() const {
  double total = 0.0;
  for (std::size_t k = 0; k < class_priors.size(); ++k) {
    total += class_priors[k] * intra_class_distance[k];
  }
  return total;
}

namespace {

struct PairEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  bool sampled = false;
};

PairEstimate EstimateIntraClass(std::vector<const Instance*> members,
                                const MixedDistance& dist) {
  PairEstimate est;
  const std::size_t m = members.size();
  if (m < 2) return est;
  // Canonical order makes the estimate independent of row order.
  std::sort(members.begin(), members.end(),
            [](const Instance* a, const Instance* b) { return a->values < b->values; });
  if (m <= kExactPairLimit) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) sum += dist(*members[i], *members[j]);
    }
    est.mean = sum / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
    return est;
  }
  std::mt19937_64 rng(kPairSamplingSeed);
  std::uniform_int_distribution<std::size_t> pick_i(0, m - 1);
  std::uniform_int_distribution<std::size_t> pick_j(0, m - 2);
  std::vector<double> draws;
  draws.reserve(kSampledPairs);
  for (std::size_t s = 0; s < kSampledPairs; ++s) {
    const std::size_t i = pick_i(rng);
    std::size_t j = pick_j(rng);
    if (j >= i) ++j;
    draws.push_back(dist(*members[i], *members[j]));
  }
  est.mean = Mean(draws);
  est.stderr_ = SampleStdDev(draws) / std::sqrt(static_cast<double>(draws.size()));
  est.sampled = true;
  return est;
}

}  // namespace

DatasetStats ComputeStats(std::span<const Instance> rows,
                          std::span<const std::size_t> labels,
                          const FeatureSchema& schema) {
  if (rows.empty()) Fail(ErrorCode::kInvalidArgument, "cannot compute stats of empty dataset");
  if (rows.size() != labels.size()) {
    Fail(ErrorCode::kInvalidArgument, "rows and labels differ in length");
  }
  DatasetStats stats;
  stats.features.resize(schema.size());
  std::vector<double> column(rows.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const FeatureSpec& spec = schema.feature(j);
    FeatureStats& fs = stats.features[j];
    for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][j];
    if (spec.continuous()) {
      fs.median = Median(column);
      fs.mad = MedianAbsoluteDeviation(column);
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      fs.observed_min = *lo;
      fs.observed_max = *hi;
    } else {
      std::vector<std::size_t> counts(spec.categories.size(), 0);
      for (double v : column) ++counts.at(static_cast<std::size_t>(v));
      fs.category_frequency.resize(counts.size());
      for (std::size_t c = 0; c < counts.size(); ++c) {
        fs.category_frequency[c] =
            static_cast<double>(counts[c]) / static_cast<double>(rows.size());
      }
    }
  }

  const std::size_t num_classes = schema.classes().size();
  std::vector<std::vector<const Instance*>> members(num_classes);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (labels[r] >= num_classes) Fail(ErrorCode::kValidation, "label index out of range");
    members[labels[r]].push_back(&rows[r]);
  }
  const MixedDistance dist(schema, stats);
  stats.class_priors.resize(num_classes);
  stats.intra_class_distance.resize(num_classes);
  stats.intra_class_stderr.resize(num_classes);
  stats.intra_class_sampled.resize(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    stats.class_priors[k] =
        static_cast<double>(members[k].size()) / static_cast<double>(rows.size());
    const PairEstimate est = EstimateIntraClass(members[k], dist);
    stats.intra_class_distance[k] = est.mean;
    stats.intra_class_stderr[k] = est.stderr_;
    stats.intra_class_sampled[k] = est.sampled;
  }
  return stats;
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool ParseReal(const std::string& cell, double* out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, *out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(*out);
}

}  // namespace

Dataset ParseCsv(std::istream& in, const FeatureSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kParse, "CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = SplitCsvLine(line);
  for (std::string& h : header) h = Trim(h);

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) Fail(ErrorCode::kValidation, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> feature_col(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    feature_col[j] = column_of(schema.feature(j).name);
  }
  const std::size_t target_col = column_of(schema.target_name());

  std::vector<Instance> rows;
  std::vector<std::size_t> labels;
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const std::string where = "row " + std::to_string(row_index);
    std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      Fail(ErrorCode::kParse, where + ": expected " + std::to_string(header.size()) +
                                  " cells, got " + std::to_string(cells.size()));
    }
    Instance x;
    x.values.resize(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const FeatureSpec& spec = schema.feature(j);
      const std::string cell = Trim(cells[feature_col[j]]);
      if (cell.empty()) Fail(ErrorCode::kParse, where + ": missing value for " + spec.name);
      if (spec.continuous()) {
        double v = 0.0;
        if (!ParseReal(cell, &v)) {
          Fail(ErrorCode::kParse, where + ": cannot parse '" + cell + "' for " + spec.name);
        }
        if (v < spec.min || v > spec.max) {
          Fail(ErrorCode::kValidation, where + ": " + spec.name + " value " + cell +
                                           " outside schema bounds");
        }
        x[j] = v;
      } else {
        const auto code = spec.CategoryIndex(cell);
        if (!code) {
          Fail(ErrorCode::kValidation,
               where + ": unknown category '" + cell + "' for " + spec.name);
        }
        x[j] = static_cast<double>(*code);
      }
    }
    const std::string label = Trim(cells[target_col]);
    const auto cls = schema.ClassIndex(label);
    if (!cls) Fail(ErrorCode::kValidation, where + ": unknown class label '" + label + "'");
    rows.push_back(std::move(x));
    labels.push_back(*cls);
    ++row_index;
  }
  if (rows.empty()) Fail(ErrorCode::kValidation, "CSV has no data rows");
  return MakeDataset(schema, std::move(rows), std::move(labels));
}

Dataset LoadCsv(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open data file " + path.string());
  return ParseCsv(in, schema);
}

Dataset MakeDataset(FeatureSchema schema, std::vector<Instance> rows,
                    std::vector<std::size_t> labels) {
  for (const Instance& x : rows) ValidateInstance(schema, x);
  Dataset data{std::move(schema), std::move(rows), std::move(labels), {}};
  data.stats = ComputeStats(data.rows, data.labels, data.schema);
  return data;
}

void WriteCsv(std::ostream& out, const Dataset& data) {
  const FeatureSchema& schema = data.schema;
  for (const FeatureSpec& f : schema.features()) out << f.name << ',';
  out << schema.target_name() << '\n';
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      out << FormatValue(schema.feature(j), data.rows[r][j]) << ',';
    }
    out << schema.classes()[data.labels[r]] << '\n';
  }
}

}  // namespace cfaudit
