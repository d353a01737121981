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

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "cfaudit/error.hpp"

namespace cfaudit {

using nlohmann::json;

namespace {

json OptionalNumber(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::size_t ClassFromJson(const FeatureSchema& schema, const json& label) {
  const auto idx = schema.ClassIndex(label.get<std::string>());
  if (!idx) Fail(ErrorCode::kParse, "unknown class '" + label.get<std::string>() + "'");
  return *idx;
}

}  // namespace

json CounterfactualResultToJson(const FeatureSchema& schema, const CounterfactualResult& result) {
  json cfs = json::array();
  for (const Counterfactual& cf : result.counterfactuals) {
    json changed = json::array();
    for (const FeatureChange& ch : cf.changes) {
      const FeatureSpec& spec = schema.feature(ch.feature);
      changed.push_back({{"feature", spec.name},
                         {"from", ValueToJson(spec, ch.from)},
                         {"to", ValueToJson(spec, ch.to)}});
    }
    cfs.push_back({{"values", InstanceToJson(schema, cf.values)},
                   {"distance", cf.distance},
                   {"fitness", cf.fitness},
                   {"class", schema.classes().at(cf.predicted_class)},
                   {"changed", std::move(changed)}});
  }
  return {{"input", InstanceToJson(schema, result.input)},
          {"input_class", schema.classes().at(result.input_class)},
          {"counterfactuals", std::move(cfs)},
          {"warnings", result.warnings},
          {"generations", result.generations_run}};
}

CounterfactualResult CounterfactualResultFromJson(const FeatureSchema& schema, const json& doc) {
  try {
    CounterfactualResult result;
    result.input = InstanceFromJson(schema, doc.at("input"));
    result.input_class = ClassFromJson(schema, doc.at("input_class"));
    for (const json& c : doc.at("counterfactuals")) {
      Counterfactual cf;
      cf.values = InstanceFromJson(schema, c.at("values"));
      cf.distance = c.at("distance").get<double>();
      cf.fitness = c.at("fitness").get<double>();
      cf.predicted_class = ClassFromJson(schema, c.at("class"));
      for (const json& ch : c.at("changed")) {
        const auto name = ch.at("feature").get<std::string>();
        const auto idx = schema.FeatureIndex(name);
        if (!idx) Fail(ErrorCode::kParse, "unknown feature '" + name + "'");
        FeatureChange fc;
        fc.feature = *idx;
        fc.from = result.input[*idx];
        fc.to = cf.values[*idx];
        cf.changes.push_back(fc);
      }
      result.counterfactuals.push_back(std::move(cf));
    }
    result.warnings = doc.at("warnings").get<std::vector<std::string>>();
    result.generations_run = doc.value("generations", std::size_t{0});
    return result;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed counterfactual result: ") + e.what());
  }
}

json RobustnessReportToJson(const RobustnessReport& r) {
  json ci = nullptr;
  if (r.ci95) ci = json::array({r.ci95->lo, r.ci95->hi});
  return {{"cerscore", r.cerscore},
          {"ci95", ci},
          {"ncerscore", OptionalNumber(r.ncerscore)},
          {"distances", r.distances},
          {"rows", r.rows},
          {"sample",
           {{"instances", r.distances.size()},
            {"classes", r.classes_sampled},
            {"per_class", r.per_class},
            {"sampled", r.sampled},
            {"skipped_misclassified", r.skipped_misclassified},
            {"failures", r.failures}}},
          {"aborted", r.aborted},
          {"notes", r.notes}};
}

json BurdenReportToJson(const BurdenReport& r) {
  json groups = json::array();
  for (const GroupBurden& g : r.groups) {
    groups.push_back({{"group", g.key},
                      {"values", g.values},
                      {"size", g.size},
                      {"failures", g.failures},
                      {"burden", OptionalNumber(g.burden)},
                      {"distances", g.distances}});
  }
  return {{"grouping", r.grouping},
          {"groups", std::move(groups)},
          {"audited", r.audited},
          {"aborted", r.aborted},
          {"notes", r.notes}};
}

json IndividualFairnessToJson(const IndividualFairnessResult& r) {
  json errors = json::object();
  if (!r.muted_error.empty()) errors["muted"] = r.muted_error;
  if (!r.unmuted_error.empty()) errors["unmuted"] = r.unmuted_error;
  return {{"instance", r.instance_id},
          {"protected", r.protected_features},
          {"fitness_muted", OptionalNumber(r.fitness_muted)},
          {"fitness_unmuted", OptionalNumber(r.fitness_unmuted)},
          {"delta", OptionalNumber(r.delta)},
          {"errors", std::move(errors)}};
}

json ImportanceReportToJson(const ImportanceReport& r) {
  json features = json::array();
  for (std::size_t i : r.Ranking()) {
    features.push_back({{"feature", r.features[i]}, {"count", r.counts[i]}});
  }
  return {{"features", std::move(features)},
          {"total", r.total},
          {"failures", r.failures},
          {"aborted", r.aborted},
          {"notes", r.notes}};
}

std::string RenderTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      text += cell;
      if (c + 1 < width.size()) text += std::string(width[c] - cell.size() + 2, ' ');
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& row : rows) line(row);
  return out.str();
}

std::string FormatFixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string CounterfactualTable(const FeatureSchema& schema, const CounterfactualResult& result) {
  std::ostringstream out;
  out << "input class: " << schema.classes().at(result.input_class) << '\n';
  if (result.counterfactuals.empty()) out << "no counterfactual found\n";
  for (std::size_t i = 0; i < result.counterfactuals.size(); ++i) {
    const Counterfactual& cf = result.counterfactuals[i];
    out << "\nexplanation " << i + 1 << ": class " << schema.classes().at(cf.predicted_class)
        << ", distance " << FormatFixed(cf.distance) << ", fitness " << FormatFixed(cf.fitness)
        << '\n';
    std::vector<std::vector<std::string>> rows;
    for (const FeatureChange& ch : cf.changes) {
      const FeatureSpec& spec = schema.feature(ch.feature);
      rows.push_back({spec.name, FormatValue(spec, ch.from), FormatValue(spec, ch.to)});
    }
    out << RenderTable({"feature", "from", "to"}, rows);
  }
  for (const std::string& w : result.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string RobustnessTable(const RobustnessReport& r) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"CERScore", FormatFixed(r.cerscore)});
  rows.push_back({"95% CI", r.ci95 ? FormatFixed(r.ci95->lo) + " - " + FormatFixed(r.ci95->hi)
                                   : "n/a"});
  rows.push_back({"NCERScore", r.ncerscore ? FormatFixed(*r.ncerscore) : "n/a"});
  rows.push_back({"instances", std::to_string(r.distances.size())});
  rows.push_back({"classes sampled", std::to_string(r.classes_sampled)});
  rows.push_back({"per class", std::to_string(r.per_class)});
  rows.push_back({"skipped (misclassified)", std::to_string(r.skipped_misclassified)});
  rows.push_back({"failures", std::to_string(r.failures)});
  std::string out = RenderTable({"metric", "value"}, rows);
  for (const std::string& n : r.notes) out += "note: " + n + '\n';
  return out;
}

std::string BurdenTable(const BurdenReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const GroupBurden& g : r.groups) {
    rows.push_back({g.key, std::to_string(g.size), g.burden ? FormatFixed(*g.burden) : "n/a",
                    std::to_string(g.failures)});
  }
  std::string out = RenderTable({"group", "size", "burden", "failures"}, rows);
  for (const std::string& n : r.notes) out += "note: " + n + '\n';
  return out;
}

std::string BurdenCsv(const BurdenReport& r) {
  std::string out = "group,size,burden,failures\n";
  for (const GroupBurden& g : r.groups) {
    std::string burden;
    if (g.burden) burden = json(*g.burden).dump();
    out += CsvField(g.key) + "," + std::to_string(g.size) + "," + burden + "," +
           std::to_string(g.failures) + "\n";
  }
  return out;
}

std::string ImportanceTable(const ImportanceReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i : r.Ranking()) {
    const double share = r.total ? static_cast<double>(r.counts[i]) / r.total : 0.0;
    rows.push_back({r.features[i], std::to_string(r.counts[i]), FormatFixed(share, 3)});
  }
  std::string out = RenderTable({"feature", "changes", "share"}, rows);
  out += "counterfactuals: " + std::to_string(r.total) + ", failures: " +
         std::to_string(r.failures) + '\n';
  return out;
}

std::string FairnessLine(const IndividualFairnessResult& r) {
  auto fmt = [](const std::optional<double>& v, const std::string& err) {
    return v ? FormatFixed(*v) : "n/a (" + err + ")";
  };
  std::string line = "instance " + (r.instance_id.empty() ? std::string("-") : r.instance_id) +
                     "  protected " + Join(r.protected_features, ",") + "  FitnessM " +
                     fmt(r.fitness_muted, r.muted_error) + "  FitnessU " +
                     fmt(r.fitness_unmuted, r.unmuted_error);
  if (r.delta) line += "  delta " + FormatFixed(*r.delta);
  return line;
}

}  // namespace cfaudit
