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

#ifndef CFAUDIT_REPORT_IO_HPP_
#define CFAUDIT_REPORT_IO_HPP_

#include <string>
#include <vector>

#include "cfaudit/audit.hpp"
#include "cfaudit/engine.hpp"
#include "cfaudit/schema.hpp"
#include "json.hpp"

namespace cfaudit {

// {"input":[...],"input_class":"1","counterfactuals":[{"values":[...],
//  "distance":..,"fitness":..,"class":"0","changed":[{"feature":..,"from":..,
//  "to":..}]}],"warnings":[],"generations":N}
nlohmann::json CounterfactualResultToJson(const FeatureSchema& schema,
                                          const CounterfactualResult& result);
// Inverse of the above. The best-fitness trace is not serialized.
CounterfactualResult CounterfactualResultFromJson(const FeatureSchema& schema,
                                                  const nlohmann::json& doc);

nlohmann::json RobustnessReportToJson(const RobustnessReport& report);
nlohmann::json BurdenReportToJson(const BurdenReport& report);
nlohmann::json IndividualFairnessToJson(const IndividualFairnessResult& result);
nlohmann::json ImportanceReportToJson(const ImportanceReport& report);

// Left-aligned columns separated by two spaces, with a dashed rule under the
// header.
std::string RenderTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows);

// Fixed-point with `digits` decimals.
std::string FormatFixed(double value, int digits = 4);

// One block per explanation listing only changed features:
//   feature  from  to
std::string CounterfactualTable(const FeatureSchema& schema, const CounterfactualResult& result);
std::string RobustnessTable(const RobustnessReport& report);
std::string BurdenTable(const BurdenReport& report);
// group,size,burden,failures; burden is empty for omitted groups.
std::string BurdenCsv(const BurdenReport& report);
std::string ImportanceTable(const ImportanceReport& report);
// "instance 12  protected race,gender  FitnessM 0.6300  FitnessU 0.8700  delta 0.2400"
std::string FairnessLine(const IndividualFairnessResult& result);

}  // namespace cfaudit

#endif  // CFAUDIT_REPORT_IO_HPP_
