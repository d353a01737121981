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

#ifndef CFAUDIT_SCHEMA_HPP_
#define CFAUDIT_SCHEMA_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cfaudit {

enum class FeatureKind { kContinuous, kCategorical };

// One column of the search space W. Continuous features carry [min, max] in
// raw units; categorical features carry their ordered label set.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  double min = 0.0;
  double max = 0.0;
  // Optional grid resolution for discretized continuous features (integer
  // valued columns, fixed-step sensors). Candidates snap to min + m * step.
  std::optional<double> step;
  std::vector<std::string> categories;
  bool is_mutable = true;

  bool continuous() const { return kind == FeatureKind::kContinuous; }
  bool categorical() const { return kind == FeatureKind::kCategorical; }
  std::optional<std::size_t> CategoryIndex(std::string_view label) const;

  bool operator==(const FeatureSpec&) const = default;
};

// Validated, immutable description of a tabular problem.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws Error(kValidation) when an invariant is violated.
  FeatureSchema(std::vector<FeatureSpec> features, std::string target_name,
                std::vector<std::string> classes,
                std::optional<std::string> favorable_class = std::nullopt);

  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(std::size_t i) const { return features_.at(i); }
  std::size_t size() const { return features_.size(); }
  std::size_t num_continuous() const { return num_continuous_; }
  std::size_t num_categorical() const { return features_.size() - num_continuous_; }

  const std::string& target_name() const { return target_name_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::optional<std::string>& favorable_label() const { return favorable_; }
  std::optional<std::size_t> favorable_class() const;

  std::optional<std::size_t> FeatureIndex(std::string_view name) const;
  std::optional<std::size_t> ClassIndex(std::string_view label) const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<FeatureSpec> features_;
  std::string target_name_;
  std::vector<std::string> classes_;
  std::optional<std::string> favorable_;
  std::size_t num_continuous_ = 0;
};

FeatureSchema SchemaFromJson(const nlohmann::json& doc);
nlohmann::json SchemaToJson(const FeatureSchema& schema);
FeatureSchema LoadSchema(const std::filesystem::path& path);

// A point in feature space. Continuous entries hold raw values; categorical
// entries hold the index of the label in FeatureSpec::categories, so the GA
// and the distances work on one flat numeric vector.
struct Instance {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const Instance&) const = default;
};

// Field-level problems ("glucose: 400 outside [0, 300]"). Empty when valid.
std::vector<std::string> InstanceProblems(const FeatureSchema& schema,
                                          const Instance& x);
void ValidateInstance(const FeatureSchema& schema, const Instance& x);

// Decodes the wire form (numbers for continuous, labels for categorical, in
// schema order). On failure returns nullopt and fills `problems`.
std::optional<Instance> InstanceFromJson(const FeatureSchema& schema,
                                         const nlohmann::json& values,
                                         std::vector<std::string>* problems);
// Throwing variant.
Instance InstanceFromJson(const FeatureSchema& schema, const nlohmann::json& values);
nlohmann::json InstanceToJson(const FeatureSchema& schema, const Instance& x);
nlohmann::json ValueToJson(const FeatureSpec& spec, double value);
std::string FormatValue(const FeatureSpec& spec, double value);

// Nearest grid point within [lo, hi] for stepped features; identity otherwise.
double SnapToGrid(const FeatureSpec& spec, double value, double lo, double hi);

}  // namespace cfaudit

#endif  // CFAUDIT_SCHEMA_HPP_
