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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cfaudit/error.hpp"

namespace cfaudit {

using nlohmann::json;

std::optional<std::size_t> FeatureSpec::CategoryIndex(std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features, std::string target_name,
                             std::vector<std::string> classes,
                             std::optional<std::string> favorable_class)
    : features_(std::move(features)),
      target_name_(std::move(target_name)),
      classes_(std::move(classes)),
      favorable_(std::move(favorable_class)) {
  if (features_.empty()) Fail(ErrorCode::kValidation, "schema has no features");
  std::set<std::string> names;
  for (const FeatureSpec& f : features_) {
    if (f.name.empty()) Fail(ErrorCode::kValidation, "feature with empty name");
    if (!names.insert(f.name).second) {
      Fail(ErrorCode::kValidation, "duplicate feature name '" + f.name + "'");
    }
    if (f.continuous()) {
      if (!f.categories.empty()) {
        Fail(ErrorCode::kValidation,
             "continuous feature '" + f.name + "' must not list categories");
      }
      if (!std::isfinite(f.min) || !std::isfinite(f.max) || f.min > f.max) {
        Fail(ErrorCode::kValidation, "invalid bounds for feature '" + f.name + "'");
      }
      if (f.step && !(*f.step > 0.0 && std::isfinite(*f.step))) {
        Fail(ErrorCode::kValidation, "invalid step for feature '" + f.name + "'");
      }
      ++num_continuous_;
    } else {
      if (f.categories.empty()) {
        Fail(ErrorCode::kValidation, "empty category set for feature '" + f.name + "'");
      }
      std::set<std::string> cats(f.categories.begin(), f.categories.end());
      if (cats.size() != f.categories.size()) {
        Fail(ErrorCode::kValidation, "duplicate category in feature '" + f.name + "'");
      }
    }
  }
  if (names.count(target_name_) != 0) {
    Fail(ErrorCode::kValidation, "target '" + target_name_ + "' is also a feature");
  }
  if (classes_.size() < 2) Fail(ErrorCode::kValidation, "schema needs >= 2 classes");
  std::set<std::string> cls(classes_.begin(), classes_.end());
  if (cls.size() != classes_.size()) Fail(ErrorCode::kValidation, "duplicate class label");
  if (favorable_ && cls.count(*favorable_) == 0) {
    Fail(ErrorCode::kValidation, "favorable class '" + *favorable_ + "' is not a class");
  }
}

std::optional<std::size_t> FeatureSchema::favorable_class() const {
  if (!favorable_) return std::nullopt;
  return ClassIndex(*favorable_);
}

std::optional<std::size_t> FeatureSchema::FeatureIndex(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::ClassIndex(std::string_view label) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == label) return i;
  }
  return std::nullopt;
}

namespace {

std::string LabelFromJson(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  Fail(ErrorCode::kParse, "class/category labels must be strings");
}

}  // namespace

FeatureSchema SchemaFromJson(const json& doc) {
  try {
    if (!doc.is_object()) Fail(ErrorCode::kParse, "schema must be a JSON object");
    std::vector<FeatureSpec> features;
    for (const json& jf : doc.at("features")) {
      FeatureSpec f;
      f.name = jf.at("name").get<std::string>();
      const std::string kind = jf.at("kind").get<std::string>();
      if (kind == "continuous") {
        f.kind = FeatureKind::kContinuous;
        f.min = jf.at("min").get<double>();
        f.max = jf.at("max").get<double>();
        if (jf.contains("step")) f.step = jf.at("step").get<double>();
        if (jf.contains("categories")) {
          Fail(ErrorCode::kValidation,
               "continuous feature '" + f.name + "' must not list categories");
        }
      } else if (kind == "categorical") {
        f.kind = FeatureKind::kCategorical;
        for (const json& c : jf.at("categories")) f.categories.push_back(LabelFromJson(c));
        if (jf.contains("min") || jf.contains("max")) {
          Fail(ErrorCode::kValidation,
               "categorical feature '" + f.name + "' must not carry min/max");
        }
      } else {
        Fail(ErrorCode::kParse, "unknown feature kind '" + kind + "'");
      }
      f.is_mutable = jf.value("mutable", true);
      features.push_back(std::move(f));
    }
    const json& target = doc.at("target");
    std::vector<std::string> classes;
    for (const json& c : target.at("classes")) classes.push_back(LabelFromJson(c));
    std::optional<std::string> favorable;
    if (target.contains("favorable") && !target.at("favorable").is_null()) {
      favorable = LabelFromJson(target.at("favorable"));
    }
    return FeatureSchema(std::move(features), target.at("name").get<std::string>(),
                         std::move(classes), std::move(favorable));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("schema: ") + e.what());
  }
}

json SchemaToJson(const FeatureSchema& schema) {
  json features = json::array();
  for (const FeatureSpec& f : schema.features()) {
    json jf;
    jf["name"] = f.name;
    if (f.continuous()) {
      jf["kind"] = "continuous";
      jf["min"] = f.min;
      jf["max"] = f.max;
      if (f.step) jf["step"] = *f.step;
    } else {
      jf["kind"] = "categorical";
      jf["categories"] = f.categories;
    }
    jf["mutable"] = f.is_mutable;
    features.push_back(std::move(jf));
  }
  json target;
  target["name"] = schema.target_name();
  target["classes"] = schema.classes();
  if (schema.favorable_label()) target["favorable"] = *schema.favorable_label();
  return json{{"features", std::move(features)}, {"target", std::move(target)}};
}

FeatureSchema LoadSchema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open schema file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return SchemaFromJson(doc);
}

std::vector<std::string> InstanceProblems(const FeatureSchema& schema, const Instance& x) {
  std::vector<std::string> problems;
  if (x.size() != schema.size()) {
    problems.push_back("expected " + std::to_string(schema.size()) + " values, got " +
                       std::to_string(x.size()));
    return problems;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FeatureSpec& f = schema.feature(i);
    const double v = x[i];
    if (f.continuous()) {
      if (!std::isfinite(v)) {
        problems.push_back(f.name + ": non-finite value");
      } else if (v < f.min || v > f.max) {
        problems.push_back(f.name + ": " + FormatValue(f, v) + " outside [" +
                           FormatValue(f, f.min) + ", " + FormatValue(f, f.max) + "]");
      }
    } else {
      const bool valid_code = v >= 0.0 && v == std::floor(v) &&
                              v < static_cast<double>(f.categories.size());
      if (!valid_code) problems.push_back(f.name + ": invalid category code");
    }
  }
  return problems;
}

void ValidateInstance(const FeatureSchema& schema, const Instance& x) {
  const std::vector<std::string> problems = InstanceProblems(schema, x);
  if (problems.empty()) return;
  std::string msg = "invalid instance: " + problems.front();
  for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
  Fail(ErrorCode::kValidation, msg);
}

std::optional<Instance> InstanceFromJson(const FeatureSchema& schema, const json& values,
                                         std::vector<std::string>* problems) {
  std::vector<std::string> local;
  std::vector<std::string>& out = problems ? *problems : local;
  if (!values.is_array()) {
    out.push_back("instance must be a JSON array");
    return std::nullopt;
  }
  if (values.size() != schema.size()) {
    out.push_back("expected " + std::to_string(schema.size()) + " values, got " +
                  std::to_string(values.size()));
    return std::nullopt;
  }
  Instance x;
  x.values.resize(schema.size());
  const std::size_t before = out.size();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FeatureSpec& f = schema.feature(i);
    const json& v = values[i];
    if (f.continuous()) {
      if (!v.is_number()) {
        out.push_back(f.name + ": expected a number");
        continue;
      }
      x[i] = v.get<double>();
      if (!(x[i] >= f.min && x[i] <= f.max)) {
        out.push_back(f.name + ": " + FormatValue(f, x[i]) + " outside [" + FormatValue(f, f.min) +
                      ", " + FormatValue(f, f.max) + "]");
      }
    } else {
      std::string label;
      if (v.is_string()) {
        label = v.get<std::string>();
      } else if (v.is_number_integer()) {
        label = std::to_string(v.get<long long>());
      } else {
        out.push_back(f.name + ": expected a category label");
        continue;
      }
      const auto code = f.CategoryIndex(label);
      if (!code) {
        out.push_back(f.name + ": unknown category '" + label + "'");
        continue;
      }
      x[i] = static_cast<double>(*code);
    }
  }
  if (out.size() != before) return std::nullopt;
  return x;
}

Instance InstanceFromJson(const FeatureSchema& schema, const json& values) {
  std::vector<std::string> problems;
  auto x = InstanceFromJson(schema, values, &problems);
  if (!x) {
    std::string msg = "invalid instance: " + problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
    Fail(ErrorCode::kValidation, msg);
  }
  return *std::move(x);
}

json ValueToJson(const FeatureSpec& spec, double value) {
  if (spec.continuous()) return value;
  return spec.categories.at(static_cast<std::size_t>(value));
}

json InstanceToJson(const FeatureSchema& schema, const Instance& x) {
  json out = json::array();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out.push_back(ValueToJson(schema.feature(i), x[i]));
  }
  return out;
}

std::string FormatValue(const FeatureSpec& spec, double value) {
  if (spec.categorical()) {
    const auto idx = static_cast<std::size_t>(value);
    return idx < spec.categories.size() ? spec.categories[idx] : "?";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double SnapToGrid(const FeatureSpec& spec, double value, double lo, double hi) {
  value = std::clamp(value, lo, hi);
  if (!spec.continuous() || !spec.step) return value;
  const double step = *spec.step;
  const double first = std::ceil((lo - spec.min) / step - 1e-9);
  const double last = std::floor((hi - spec.min) / step + 1e-9);
  if (first > last) return value;
  const double m = std::clamp(std::round((value - spec.min) / step), first, last);
  return std::clamp(spec.min + m * step, lo, hi);
}

}  // namespace cfaudit
