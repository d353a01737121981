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

#include <cmath>
#include <string>

#include "cfaudit/error.hpp"

namespace cfaudit {

using nlohmann::json;

void ValidateConstraints(const FeatureSchema& schema, const Constraints& c) {
  for (const auto& [idx, range] : c.ranges) {
    if (idx >= schema.size()) Fail(ErrorCode::kValidation, "range on unknown feature");
    const FeatureSpec& f = schema.feature(idx);
    if (!f.continuous()) {
      Fail(ErrorCode::kValidation, f.name + ": range given for a categorical feature");
    }
    const auto [lo, hi] = range;
    if (!(lo <= hi)) Fail(ErrorCode::kValidation, f.name + ": range lower bound exceeds upper");
    if (lo < f.min || hi > f.max) {
      Fail(ErrorCode::kValidation, f.name + ": range [" + FormatValue(f, lo) + ", " +
                                       FormatValue(f, hi) + "] outside schema bounds [" +
                                       FormatValue(f, f.min) + ", " + FormatValue(f, f.max) +
                                       "]");
    }
    if (f.step) {
      const double first = std::ceil((lo - f.min) / *f.step - 1e-9);
      const double last = std::floor((hi - f.min) / *f.step + 1e-9);
      if (first > last) {
        Fail(ErrorCode::kValidation, f.name + ": range [" + FormatValue(f, lo) + ", " +
                                         FormatValue(f, hi) + "] holds no multiple of step " +
                                         FormatValue(f, *f.step));
      }
    }
  }
  for (const auto& [idx, codes] : c.allowed) {
    if (idx >= schema.size()) Fail(ErrorCode::kValidation, "category set on unknown feature");
    const FeatureSpec& f = schema.feature(idx);
    if (!f.categorical()) {
      Fail(ErrorCode::kValidation, f.name + ": allowed categories given for a continuous feature");
    }
    if (codes.empty()) Fail(ErrorCode::kValidation, f.name + ": allowed category set is empty");
    for (std::size_t code : codes) {
      if (code >= f.categories.size()) Fail(ErrorCode::kValidation, f.name + ": unknown category");
    }
  }
  for (std::size_t idx : c.muted) {
    if (idx >= schema.size()) Fail(ErrorCode::kValidation, "muted feature index out of range");
  }
  if (c.target && *c.target >= schema.classes().size()) {
    Fail(ErrorCode::kValidation, "target class out of range");
  }
  if (c.k < 1) Fail(ErrorCode::kValidation, "k must be >= 1");
}

std::set<std::size_t> EffectiveMuted(const FeatureSchema& schema, const Constraints& c) {
  std::set<std::size_t> muted = c.muted;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!schema.feature(j).is_mutable) muted.insert(j);
  }
  return muted;
}

bool AllFeaturesMuted(const FeatureSchema& schema, const Constraints& c) {
  return EffectiveMuted(schema, c).size() == schema.size();
}

Constraints ApplyConstraintPatch(const FeatureSchema& schema, const Constraints& base,
                                 const json& patch) {
  if (!patch.is_object()) Fail(ErrorCode::kValidation, "constraint patch must be an object");
  Constraints out = base;
  for (const auto& [name, body] : patch.items()) {
    const auto idx = schema.FeatureIndex(name);
    if (!idx) Fail(ErrorCode::kValidation, "unknown feature '" + name + "'");
    const FeatureSpec& f = schema.feature(*idx);
    if (!body.is_object()) Fail(ErrorCode::kValidation, name + ": patch entry must be an object");
    for (const auto& [key, value] : body.items()) {
      if (key == "range") {
        if (value.is_null()) {
          out.ranges.erase(*idx);
          continue;
        }
        if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
            !value[1].is_number()) {
          Fail(ErrorCode::kValidation, name + ": range must be [lo, hi]");
        }
        out.ranges[*idx] = {value[0].get<double>(), value[1].get<double>()};
      } else if (key == "allowed") {
        if (value.is_null()) {
          out.allowed.erase(*idx);
          continue;
        }
        if (!value.is_array()) Fail(ErrorCode::kValidation, name + ": allowed must be a list");
        std::vector<std::size_t> codes;
        for (const json& label : value) {
          const auto code = label.is_string() ? f.CategoryIndex(label.get<std::string>())
                                              : std::nullopt;
          if (!code) Fail(ErrorCode::kValidation, name + ": unknown category " + label.dump());
          codes.push_back(*code);
        }
        out.allowed[*idx] = std::move(codes);
      } else if (key == "muted") {
        if (!value.is_boolean()) Fail(ErrorCode::kValidation, name + ": muted must be boolean");
        if (value.get<bool>()) {
          out.muted.insert(*idx);
        } else {
          out.muted.erase(*idx);
        }
      } else {
        Fail(ErrorCode::kValidation, name + ": unknown constraint key '" + key + "'");
      }
    }
  }
  ValidateConstraints(schema, out);
  return out;
}

json ConstraintsToJson(const FeatureSchema& schema, const Constraints& c) {
  json out = json::object();
  for (const auto& [idx, range] : c.ranges) {
    out[schema.feature(idx).name]["range"] = {range.first, range.second};
  }
  for (const auto& [idx, codes] : c.allowed) {
    json labels = json::array();
    for (std::size_t code : codes) labels.push_back(schema.feature(idx).categories[code]);
    out[schema.feature(idx).name]["allowed"] = std::move(labels);
  }
  for (std::size_t idx : c.muted) out[schema.feature(idx).name]["muted"] = true;
  return out;
}

Constraints WithMuted(const FeatureSchema& schema, Constraints c,
                      const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    const auto idx = schema.FeatureIndex(name);
    if (!idx) Fail(ErrorCode::kValidation, "unknown feature '" + name + "'");
    c.muted.insert(*idx);
  }
  return c;
}

}  // namespace cfaudit
