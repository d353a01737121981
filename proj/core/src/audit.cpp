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

#include "cfaudit/audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "cfaudit/error.hpp"
#include "cfaudit/robust_stats.hpp"

namespace cfaudit {

RobustnessReport CerScore(std::span<const double> distances) {
  if (distances.empty()) Fail(ErrorCode::kInvalidArgument, "CERScore needs at least one distance");
  for (double d : distances) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      Fail(ErrorCode::kInvalidArgument, "CERScore distances must be positive and finite");
    }
  }
  RobustnessReport report;
  report.distances.assign(distances.begin(), distances.end());
  report.cerscore = Mean(distances);
  if (distances.size() >= 2) {
    const double half =
        kZ95 * SampleStdDev(distances) / std::sqrt(static_cast<double>(distances.size()));
    report.ci95 = ConfidenceInterval{report.cerscore - half, report.cerscore + half};
  }
  return report;
}

double NcerScore(double cerscore, std::span<const double> priors,
                 std::span<const double> intra_class_distance) {
  if (priors.size() != intra_class_distance.size()) {
    Fail(ErrorCode::kInvalidArgument, "priors and intra-class distances differ in length");
  }
  double denom = 0.0;
  for (std::size_t k = 0; k < priors.size(); ++k) denom += priors[k] * intra_class_distance[k];
  if (!(denom > 0.0)) {
    Fail(ErrorCode::kInvalidArgument,
         "expected intra-class distance is zero; NCERScore undefined");
  }
  return cerscore / denom;
}

double NcerScore(double cerscore, const DatasetStats& stats) {
  return NcerScore(cerscore, stats.class_priors, stats.intra_class_distance);
}

double Burden(std::span<const double> distances) { return Mean(distances); }

std::vector<std::size_t> ImportanceReport::Ranking() const {
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  return order;
}

namespace {

struct Job {
  std::size_t row = 0;
  Instance x;
  Constraints constraints;
};

struct Outcome {
  std::optional<CounterfactualResult> result;
  std::optional<Error> error;
};

bool IsTransportFailure(const Error& e) {
  return e.code() == ErrorCode::kTransport || e.code() == ErrorCode::kProtocol;
}

// Runs one generation per job; outcomes are stored by job index so the
// aggregation order never depends on scheduling.
std::vector<Outcome> RunJobs(const Predictor& f, const FeatureSchema& schema,
                             const DistanceFn& distance, const std::vector<Job>& jobs,
                             const AuditOptions& options) {
  std::vector<Outcome> outcomes(jobs.size());
  auto run_one = [&](std::size_t i) {
    GAConfig cfg = options.ga;
    cfg.seed = DeriveSeed(options.ga.seed, jobs[i].row);
    try {
      GeneticEngine engine(schema, f, distance, cfg);
      outcomes[i].result = engine.Generate(jobs[i].x, jobs[i].constraints);
    } catch (const Error& e) {
      outcomes[i].error = e;
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(options.threads, 1), jobs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_one(i);
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
    });
  }
  for (std::thread& th : pool) th.join();
  return outcomes;
}

std::optional<double> FirstDistance(const Outcome& o) {
  if (!o.result || o.result->counterfactuals.empty()) return std::nullopt;
  return o.result->counterfactuals.front().distance;
}

}  // namespace

RobustnessReport AuditRobustness(const Predictor& f, const Dataset& data,
                                 const DistanceFn& distance, const RobustnessSampling& sampling,
                                 const AuditOptions& options) {
  if (data.size() == 0) Fail(ErrorCode::kInvalidArgument, "robustness audit on empty dataset");
  if (sampling.per_class == 0) Fail(ErrorCode::kInvalidArgument, "per-class sample size must be >= 1");
  std::vector<std::size_t> pool = sampling.candidate_rows;
  if (pool.empty()) {
    pool.resize(data.size());
    std::iota(pool.begin(), pool.end(), 0);
  }
  const std::size_t num_classes = data.schema.classes().size();
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t r : pool) {
    if (r >= data.size()) Fail(ErrorCode::kInvalidArgument, "candidate row out of range");
    by_class[data.labels[r]].push_back(r);
  }
  std::vector<std::size_t> present;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (!by_class[k].empty()) present.push_back(k);
  }

  Rng rng(sampling.seed);
  std::vector<std::size_t> chosen = present;
  if (sampling.classes != 0 && sampling.classes < present.size()) {
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(sampling.classes);
    std::sort(chosen.begin(), chosen.end());
  }
  std::vector<std::size_t> sampled;
  for (std::size_t k : chosen) {
    std::vector<std::size_t> rows = by_class[k];
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(std::min(rows.size(), sampling.per_class));
    sampled.insert(sampled.end(), rows.begin(), rows.end());
  }

  std::vector<Instance> xs;
  for (std::size_t r : sampled) xs.push_back(data.rows[r]);
  const std::vector<std::size_t> predicted = f.PredictBatch(xs);

  std::vector<Job> jobs;
  std::size_t misclassified = 0;
  std::size_t already_target = 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const std::size_t r = sampled[i];
    if (sampling.only_correct && predicted[i] != data.labels[r]) {
      ++misclassified;
      continue;
    }
    if (sampling.target && predicted[i] == *sampling.target) {
      ++already_target;
      continue;
    }
    Constraints c = options.base;
    c.target = sampling.target;
    c.k = 1;
    jobs.push_back(Job{r, data.rows[r], std::move(c)});
  }

  const std::vector<Outcome> outcomes = RunJobs(f, data.schema, distance, jobs, options);
  std::vector<double> distances;
  std::vector<std::size_t> rows;
  std::size_t failures = 0;
  bool aborted = false;
  std::string abort_reason;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error && IsTransportFailure(*outcomes[i].error)) {
      aborted = true;
      abort_reason = outcomes[i].error->what();
      break;
    }
    if (const auto d = FirstDistance(outcomes[i])) {
      distances.push_back(*d);
      rows.push_back(jobs[i].row);
    } else {
      ++failures;
    }
  }
  if (distances.empty()) {
    Fail(aborted ? ErrorCode::kTransport : ErrorCode::kInfeasibleSpace,
         "robustness audit found no counterfactual: sampled " + std::to_string(sampled.size()) +
             ", misclassified " + std::to_string(misclassified) + ", infeasible " +
             std::to_string(failures) + (aborted ? ", aborted: " + abort_reason : ""));
  }
  RobustnessReport report = CerScore(distances);
  report.rows = std::move(rows);
  report.classes_sampled = chosen.size();
  report.per_class = sampling.per_class;
  report.sampled = sampled.size();
  report.skipped_misclassified = misclassified;
  report.failures = failures;
  report.aborted = aborted;
  if (aborted) report.notes.push_back("aborted: " + abort_reason);
  if (already_target > 0) {
    report.notes.push_back(std::to_string(already_target) +
                           " instances already predicted as the target class were skipped");
  }
  if (failures > 0) {
    report.notes.push_back(std::to_string(failures) + " instances had no feasible counterfactual");
  }
  if (data.stats.ExpectedIntraClassDistance() > 0.0) {
    report.ncerscore = NcerScore(report.cerscore, data.stats);
  } else {
    report.notes.push_back("NCERScore undefined: expected intra-class distance is zero");
  }
  return report;
}

BurdenReport AuditBurden(const Predictor& f, const Dataset& data, const DistanceFn& distance,
                         const BurdenOptions& burden, const AuditOptions& options) {
  const FeatureSchema& schema = data.schema;
  if (burden.group_by.empty()) Fail(ErrorCode::kValidation, "burden needs >= 1 grouping feature");
  std::vector<std::size_t> group_idx;
  for (const std::string& name : burden.group_by) {
    const auto idx = schema.FeatureIndex(name);
    if (!idx) Fail(ErrorCode::kValidation, "unknown grouping feature '" + name + "'");
    group_idx.push_back(*idx);
  }
  std::optional<std::size_t> favorable;
  if (burden.filter == OutcomeFilter::kUnfavorable) {
    favorable = schema.favorable_class();
    if (!favorable) {
      Fail(ErrorCode::kValidation, "schema has no favorable class; choose another outcome filter");
    }
  }
  const Constraints muted = WithMuted(schema, options.base, burden.group_by);
  const std::vector<std::size_t> predicted = f.PredictBatch(data.rows);
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const bool keep = burden.filter == OutcomeFilter::kAll ||
                      (burden.filter == OutcomeFilter::kUnfavorable && predicted[r] != *favorable) ||
                      (burden.filter == OutcomeFilter::kPredictedClass &&
                       predicted[r] == burden.outcome_class);
    if (!keep) continue;
    Constraints c = muted;
    c.target.reset();
    c.k = 1;
    jobs.push_back(Job{r, data.rows[r], std::move(c)});
  }

  BurdenReport report;
  report.grouping = burden.group_by;
  const std::vector<Outcome> outcomes = RunJobs(f, schema, distance, jobs, options);
  std::map<std::string, GroupBurden> groups;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].error && IsTransportFailure(*outcomes[i].error)) {
      report.aborted = true;
      report.notes.push_back(std::string("aborted: ") + outcomes[i].error->what());
      break;
    }
    std::string key;
    std::vector<std::string> values;
    for (std::size_t g = 0; g < group_idx.size(); ++g) {
      const FeatureSpec& spec = schema.feature(group_idx[g]);
      values.push_back(FormatValue(spec, jobs[i].x[group_idx[g]]));
      if (g > 0) key += ",";
      key += spec.name + "=" + values.back();
    }
    GroupBurden& gb = groups[key];
    gb.key = key;
    gb.values = std::move(values);
    ++gb.size;
    ++report.audited;
    if (const auto d = FirstDistance(outcomes[i])) {
      gb.distances.push_back(*d);
    } else {
      ++gb.failures;
    }
  }
  for (auto& [key, gb] : groups) {
    if (gb.distances.empty()) {
      report.notes.push_back("group " + key + " omitted: no counterfactual found for any member");
    } else {
      gb.burden = Burden(gb.distances);
    }
    report.groups.push_back(std::move(gb));
  }
  if (report.groups.empty()) report.notes.push_back("no instance passed the outcome filter");
  return report;
}

IndividualFairnessResult AuditIndividualFairness(const Predictor& f, const FeatureSchema& schema,
                                                 const DistanceFn& distance, const Instance& x,
                                                 const std::vector<std::string>& protected_features,
                                                 const AuditOptions& options,
                                                 std::string instance_id) {
  std::vector<std::size_t> idx;
  for (const std::string& name : protected_features) {
    const auto i = schema.FeatureIndex(name);
    if (!i) Fail(ErrorCode::kValidation, "unknown protected feature '" + name + "'");
    idx.push_back(*i);
  }
  ValidateInstance(schema, x);
  if (const auto fav = schema.favorable_class(); fav && f.Predict(x) == *fav) {
    Fail(ErrorCode::kValidation, "instance already receives the favorable outcome");
  }
  IndividualFairnessResult result;
  result.instance_id = std::move(instance_id);
  result.protected_features = protected_features;

  Constraints muted = WithMuted(schema, options.base, protected_features);
  Constraints unmuted = options.base;
  for (std::size_t i : idx) unmuted.muted.erase(i);
  muted.k = unmuted.k = 1;

  const GeneticEngine engine(schema, f, distance, options.ga);
  auto run = [&](const Constraints& c, std::optional<double>* fitness, std::string* error) {
    try {
      const CounterfactualResult r = engine.Generate(x, c);
      if (r.counterfactuals.empty()) {
        *error = "no counterfactual found";
      } else {
        *fitness = r.counterfactuals.front().fitness;
      }
    } catch (const Error& e) {
      *error = e.what();
    }
  };
  run(muted, &result.fitness_muted, &result.muted_error);
  run(unmuted, &result.fitness_unmuted, &result.unmuted_error);
  if (result.fitness_muted && result.fitness_unmuted) {
    result.delta = *result.fitness_unmuted - *result.fitness_muted;
  }
  return result;
}

ImportanceReport AuditFeatureImportance(const Predictor& f, const Dataset& data,
                                        const DistanceFn& distance, const AuditOptions& options,
                                        std::span<const std::size_t> rows) {
  if (data.size() == 0) Fail(ErrorCode::kInvalidArgument, "importance audit on empty dataset");
  std::vector<Job> jobs;
  auto add = [&](std::size_t r) {
    if (r >= data.size()) Fail(ErrorCode::kInvalidArgument, "row out of range");
    Constraints c = options.base;
    c.target.reset();
    c.k = 1;
    jobs.push_back(Job{r, data.rows[r], std::move(c)});
  };
  if (rows.empty()) {
    for (std::size_t r = 0; r < data.size(); ++r) add(r);
  } else {
    for (std::size_t r : rows) add(r);
  }
  ImportanceReport report;
  for (const FeatureSpec& spec : data.schema.features()) report.features.push_back(spec.name);
  report.counts.assign(data.schema.size(), 0);
  const std::vector<Outcome> outcomes = RunJobs(f, data.schema, distance, jobs, options);
  for (const Outcome& o : outcomes) {
    if (o.error && IsTransportFailure(*o.error)) {
      report.aborted = true;
      report.notes.push_back(std::string("aborted: ") + o.error->what());
      break;
    }
    if (!o.result || o.result->counterfactuals.empty()) {
      ++report.failures;
      continue;
    }
    ++report.total;
    for (const FeatureChange& ch : o.result->counterfactuals.front().changes) {
      ++report.counts[ch.feature];
    }
  }
  if (report.failures > 0) {
    report.notes.push_back(std::to_string(report.failures) +
                           " instances had no feasible counterfactual");
  }
  return report;
}

}  // namespace cfaudit
