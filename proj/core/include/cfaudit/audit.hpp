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

#ifndef CFAUDIT_AUDIT_HPP_
#define CFAUDIT_AUDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfaudit/constraints.hpp"
#include "cfaudit/dataset.hpp"
#include "cfaudit/distance.hpp"
#include "cfaudit/engine.hpp"
#include "cfaudit/predictor.hpp"

namespace cfaudit {

inline constexpr double kZ95 = 1.96;

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct RobustnessReport {
  double cerscore = 0.0;
  std::optional<ConfidenceInterval> ci95;  // needs >= 2 distances
  std::optional<double> ncerscore;
  std::vector<double> distances;
  std::vector<std::size_t> rows;  // dataset rows behind `distances`
  std::size_t classes_sampled = 0;
  std::size_t per_class = 0;
  std::size_t sampled = 0;
  std::size_t skipped_misclassified = 0;
  std::size_t failures = 0;
  bool aborted = false;
  std::vector<std::string> notes;
};

// Mean distance with a normal 95% interval mean +/- 1.96 s / sqrt(N), s the
// unbiased sample standard deviation. Throws on empty input or any
// non-positive distance.
RobustnessReport CerScore(std::span<const double> distances);

// cerscore / sum_k P(class_k) E[d | class_k]; throws when the denominator is 0.
double NcerScore(double cerscore, const DatasetStats& stats);
double NcerScore(double cerscore, std::span<const double> priors,
                 std::span<const double> intra_class_distance);

// Shared knobs for every audit.
struct AuditOptions {
  GAConfig ga;              // ga.seed is the master seed
  Constraints base;         // applied to every generated counterfactual
  std::size_t threads = 1;  // per-instance generations run concurrently
};

struct RobustnessSampling {
  std::size_t classes = 0;     // 0 = every class present
  std::size_t per_class = 50;
  std::uint64_t seed = 0;
  bool only_correct = true;    // keep instances with f(x) == ground truth
  std::optional<std::size_t> target;
  // Restrict sampling to these rows (e.g. a held-out split); empty = all.
  std::vector<std::size_t> candidate_rows;
};

RobustnessReport AuditRobustness(const Predictor& f, const Dataset& data,
                                 const DistanceFn& distance, const RobustnessSampling& sampling,
                                 const AuditOptions& options);

struct GroupBurden {
  std::string key;  // "race=Black,gender=F"
  std::vector<std::string> values;
  std::size_t size = 0;
  std::size_t failures = 0;
  std::optional<double> burden;  // absent when every member failed
  std::vector<double> distances;
};

struct BurdenReport {
  std::vector<std::string> grouping;
  std::vector<GroupBurden> groups;  // sorted by key
  std::size_t audited = 0;
  bool aborted = false;
  std::vector<std::string> notes;
};

enum class OutcomeFilter {
  kAll,
  kUnfavorable,     // f(x) != schema favorable class
  kPredictedClass,  // f(x) == outcome_class
};

struct BurdenOptions {
  std::vector<std::string> group_by;
  OutcomeFilter filter = OutcomeFilter::kUnfavorable;
  std::size_t outcome_class = 0;
};

// Mean of the given counterfactual distances.
double Burden(std::span<const double> distances);

// Grouping features are muted while generating so the attribution stays with
// the group.
BurdenReport AuditBurden(const Predictor& f, const Dataset& data, const DistanceFn& distance,
                         const BurdenOptions& burden, const AuditOptions& options);

struct IndividualFairnessResult {
  std::string instance_id;
  std::vector<std::string> protected_features;
  std::optional<double> fitness_muted;
  std::optional<double> fitness_unmuted;
  std::optional<double> delta;  // unmuted - muted
  std::string muted_error;
  std::string unmuted_error;
};

// Two runs with the same seed: protected features muted, then free (schema
// immutability still applies). Reports raw evidence, no verdict.
IndividualFairnessResult AuditIndividualFairness(const Predictor& f, const FeatureSchema& schema,
                                                 const DistanceFn& distance, const Instance& x,
                                                 const std::vector<std::string>& protected_features,
                                                 const AuditOptions& options,
                                                 std::string instance_id = "");

struct ImportanceReport {
  std::vector<std::string> features;
  std::vector<std::size_t> counts;
  std::size_t total = 0;  // counterfactuals generated
  std::size_t failures = 0;
  bool aborted = false;
  std::vector<std::string> notes;

  // Feature indices ordered by descending count (ties by index).
  std::vector<std::size_t> Ranking() const;
};

// One counterfactual per row regardless of prediction.
ImportanceReport AuditFeatureImportance(const Predictor& f, const Dataset& data,
                                        const DistanceFn& distance, const AuditOptions& options,
                                        std::span<const std::size_t> rows = {});

}  // namespace cfaudit

#endif  // CFAUDIT_AUDIT_HPP_
