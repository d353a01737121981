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

#ifndef CFAUDIT_CONSTRAINTS_HPP_
#define CFAUDIT_CONSTRAINTS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cfaudit/schema.hpp"
#include "json.hpp"

namespace cfaudit {

// Per-request restrictions of the search space W.
struct Constraints {
  // Continuous features: [lo, hi] nested in the schema bounds.
  std::map<std::size_t, std::pair<double, double>> ranges;
  // Categorical features: allowed category codes (non-empty subset).
  std::map<std::size_t, std::vector<std::size_t>> allowed;
  // Frozen to the input value. Schema-immutable features are always muted in
  // addition to these.
  std::set<std::size_t> muted;
  std::optional<std::size_t> target;
  std::size_t k = 1;

  bool operator==(const Constraints&) const = default;
};

// Throws kValidation naming the offending feature.
void ValidateConstraints(const FeatureSchema& schema, const Constraints& c);

// Muted set after adding schema-immutable features.
std::set<std::size_t> EffectiveMuted(const FeatureSchema& schema, const Constraints& c);
bool AllFeaturesMuted(const FeatureSchema& schema, const Constraints& c);

// Applies a feature-keyed patch, e.g.
//   {"glucose":{"range":[70,120]}, "age":{"muted":true}, "race":{"allowed":["A"]}}
// "range": null / "allowed": null remove an override. Unknown features and
// out-of-bounds ranges throw kValidation; the input is left untouched.
Constraints ApplyConstraintPatch(const FeatureSchema& schema, const Constraints& base,
                                 const nlohmann::json& patch);

// Same keyed form, listing only active overrides.
nlohmann::json ConstraintsToJson(const FeatureSchema& schema, const Constraints& c);

// Mutes the named features (validating the names).
Constraints WithMuted(const FeatureSchema& schema, Constraints c,
                      const std::vector<std::string>& names);

}  // namespace cfaudit

#endif  // CFAUDIT_CONSTRAINTS_HPP_
