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

#include "cfaudit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "cfaudit/error.hpp"

namespace cfaudit {

std::size_t DefaultPopulation(std::size_t num_features) {
  const std::size_t squared = num_features * num_features;
  return std::clamp(squared, kMinPopulation, kMaxPopulation);
}

std::size_t GAConfig::ResolvedPopulation(std::size_t num_features) const {
  return population_size == 0 ? DefaultPopulation(num_features) : population_size;
}

void GAConfig::Validate(std::size_t num_features) const {
  const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(mutation_probability) || !in_unit(crossover_probability) ||
      !in_unit(revert_probability)) {
    Fail(ErrorCode::kInvalidArgument, "GA probabilities must lie in [0, 1]");
  }
  if (generations < 1) Fail(ErrorCode::kInvalidArgument, "generations must be >= 1");
  const std::size_t pop = ResolvedPopulation(num_features);
  if (pop < 2) Fail(ErrorCode::kInvalidArgument, "population must hold >= 2 individuals");
  if (elite_count >= pop) {
    Fail(ErrorCode::kInvalidArgument, "elite count must be smaller than the population");
  }
  if (!(mutation_scale > 0.0) || !std::isfinite(mutation_scale)) {
    Fail(ErrorCode::kInvalidArgument, "mutation scale must be positive");
  }
  if (init_attempt_multiplier < 1) {
    Fail(ErrorCode::kInvalidArgument, "init attempt multiplier must be >= 1");
  }
}

// ---------------------------------------------------------------------------
// SearchSpace

SearchSpace::SearchSpace(const FeatureSchema& schema, const Constraints& constraints,
                         const Instance& x)
    : schema_(&schema), x_(x) {
  const std::set<std::size_t> muted = EffectiveMuted(schema, constraints);
  domains_.resize(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const FeatureSpec& f = schema.feature(j);
    FeatureDomain& d = domains_[j];
    d.continuous = f.continuous();
    if (muted.count(j) != 0) {
      d.fixed = true;
      d.lo = d.hi = x[j];
      d.contains_input = true;
      continue;
    }
    if (f.continuous()) {
      d.lo = f.min;
      d.hi = f.max;
      if (auto it = constraints.ranges.find(j); it != constraints.ranges.end()) {
        d.lo = it->second.first;
        d.hi = it->second.second;
      }
      d.contains_input = x[j] >= d.lo && x[j] <= d.hi;
      if (d.lo == d.hi && d.lo == x[j]) d.fixed = true;
    } else {
      if (auto it = constraints.allowed.find(j); it != constraints.allowed.end()) {
        for (std::size_t code : it->second) d.choices.push_back(static_cast<double>(code));
        std::sort(d.choices.begin(), d.choices.end());
        d.choices.erase(std::unique(d.choices.begin(), d.choices.end()), d.choices.end());
      } else {
        for (std::size_t code = 0; code < f.categories.size(); ++code) {
          d.choices.push_back(static_cast<double>(code));
        }
      }
      d.contains_input = std::find(d.choices.begin(), d.choices.end(), x[j]) != d.choices.end();
      if (d.choices.size() == 1 && d.choices[0] == x[j]) d.fixed = true;
    }
    if (!d.fixed) free_.push_back(j);
  }
}

double SearchSpace::Snap(std::size_t j, double v) const {
  const FeatureDomain& d = domains_[j];
  return SnapToGrid(schema_->feature(j), v, d.lo, d.hi);
}

bool SearchSpace::Contains(const Instance& c) const {
  if (c.size() != domains_.size()) return false;
  for (std::size_t j = 0; j < domains_.size(); ++j) {
    const FeatureDomain& d = domains_[j];
    if (d.fixed) {
      if (c[j] != x_[j]) return false;
    } else if (d.continuous) {
      if (!(c[j] >= d.lo && c[j] <= d.hi)) return false;
    } else if (std::find(d.choices.begin(), d.choices.end(), c[j]) == d.choices.end()) {
      return false;
    }
  }
  return true;
}

Instance SearchSpace::Sample(Rng& rng) const {
  Instance c = x_;
  for (std::size_t j : free_) {
    const FeatureDomain& d = domains_[j];
    if (!d.continuous) {
      std::uniform_int_distribution<std::size_t> pick(0, d.choices.size() - 1);
      c[j] = d.choices[pick(rng)];
      continue;
    }
    const FeatureSpec& f = schema_->feature(j);
    if (f.step) {
      const double step = *f.step;
      const double first = std::ceil((d.lo - f.min) / step - 1e-9);
      const double last = std::floor((d.hi - f.min) / step + 1e-9);
      if (first <= last) {
        std::uniform_int_distribution<long long> pick(static_cast<long long>(first),
                                                      static_cast<long long>(last));
        c[j] = Snap(j, f.min + static_cast<double>(pick(rng)) * step);
        continue;
      }
    }
    std::uniform_real_distribution<double> u(d.lo, d.hi);
    c[j] = Snap(j, u(rng));
  }
  return c;
}

void SearchSpace::Mutate(Instance& c, double scale, double revert_probability,
                         Rng& rng) const {
  if (free_.empty()) return;
  std::bernoulli_distribution touch(1.0 / static_cast<double>(free_.size()));
  std::bernoulli_distribution revert(revert_probability);
  for (std::size_t j : free_) {
    if (!touch(rng)) continue;
    const FeatureDomain& d = domains_[j];
    if (!d.continuous) {
      std::uniform_int_distribution<std::size_t> pick(0, d.choices.size() - 1);
      c[j] = d.choices[pick(rng)];
      continue;
    }
    if (d.contains_input && revert(rng)) {
      c[j] = x_[j];
      continue;
    }
    const double sigma = scale * (d.hi - d.lo);
    if (sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, sigma);
      c[j] = Snap(j, c[j] + noise(rng));
    } else {
      c[j] = d.lo;
    }
  }
}

std::vector<std::size_t> ChangedFeatures(const Instance& x, const Instance& c) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < x.size() && j < c.size(); ++j) {
    if (x[j] != c[j]) out.push_back(j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GeneticEngine

GeneticEngine::GeneticEngine(const FeatureSchema& schema, const Predictor& predictor,
                             DistanceFn distance, GAConfig config)
    : schema_(schema),
      predictor_(predictor),
      distance_(std::move(distance)),
      config_(config),
      population_size_(config.ResolvedPopulation(schema.size())) {
  config_.Validate(schema.size());
  if (predictor_.classes() != schema_.classes()) {
    Fail(ErrorCode::kValidation, "predictor classes do not match the schema classes");
  }
}

SearchProblem GeneticEngine::MakeProblem(const Instance& x,
                                         const Constraints& constraints) const {
  ValidateInstance(schema_, x);
  ValidateConstraints(schema_, constraints);
  if (AllFeaturesMuted(schema_, constraints)) {
    Fail(ErrorCode::kInfeasibleSpace,
         "every feature is muted; no candidate can change the prediction");
  }
  const std::size_t input_class = predictor_.Predict(x);
  if (constraints.target && *constraints.target == input_class) {
    Fail(ErrorCode::kValidation, "target class equals the prediction for the input");
  }
  SearchProblem problem{x, input_class, constraints.target, SearchSpace(schema_, constraints, x)};
  if (problem.space.free_features().empty()) {
    Fail(ErrorCode::kInfeasibleSpace, "constraints leave no free feature to change");
  }
  return problem;
}

void GeneticEngine::Score(const SearchProblem& problem, std::vector<Instance>& candidates,
                          Population* accepted) const {
  if (candidates.empty()) return;
  const std::vector<std::size_t> labels = predictor_.PredictBatch(candidates);
  if (labels.size() != candidates.size()) {
    Fail(ErrorCode::kProtocol, "predictor returned the wrong number of labels");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!problem.Accepts(labels[i])) continue;
    const double d = distance_(problem.x, candidates[i]);
    accepted->push_back(Individual{std::move(candidates[i]), d, labels[i]});
  }
}

Population GeneticEngine::InitializePopulation(const SearchProblem& problem, Rng& rng,
                                               std::size_t* attempts_out) const {
  return InitializeUntil(problem, rng, std::nullopt, attempts_out);
}

Population GeneticEngine::InitializeUntil(
    const SearchProblem& problem, Rng& rng,
    std::optional<std::chrono::steady_clock::time_point> deadline,
    std::size_t* attempts_out) const {
  if (problem.space.free_features().empty()) {
    Fail(ErrorCode::kInfeasibleSpace, "constraints leave no free feature to change");
  }
  const std::size_t target = population_size_;
  const std::size_t max_attempts = config_.init_attempt_multiplier * target;
  Population population;
  population.reserve(target);
  std::size_t attempts = 0;
  std::vector<Instance> batch;
  while (population.size() < target && attempts < max_attempts) {
    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      if (population.empty()) {
        Fail(ErrorCode::kBudgetExhausted,
             "time budget exhausted after " + std::to_string(attempts) +
                 " samples without a feasible candidate");
      }
      break;
    }
    const std::size_t want =
        std::min(std::max<std::size_t>(target - population.size(), 64), max_attempts - attempts);
    batch.clear();
    for (std::size_t i = 0; i < want; ++i) batch.push_back(problem.space.Sample(rng));
    attempts += want;
    Score(problem, batch, &population);
  }
  if (attempts_out) *attempts_out = attempts;
  if (population.empty()) {
    Fail(ErrorCode::kInfeasibleSpace,
         "no candidate with a different prediction found in " + std::to_string(attempts) +
             " random samples of the constrained space");
  }
  if (population.size() > target) population.resize(target);
  return population;
}

namespace {

void SortByFitness(Population& population) {
  std::stable_sort(population.begin(), population.end(),
                   [](const Individual& a, const Individual& b) { return a.distance < b.distance; });
}

double BestFitness(const Population& population) {
  double best = std::numeric_limits<double>::infinity();
  for (const Individual& ind : population) best = std::min(best, ind.distance);
  if (std::isinf(best)) return 0.0;
  if (best == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / best;
}

}  // namespace

EvolveOutcome GeneticEngine::Evolve(Population& population, const SearchProblem& problem,
                                    Rng& rng) const {
  if (population.empty()) Fail(ErrorCode::kInvalidArgument, "cannot evolve an empty population");
  EvolveOutcome outcome;
  SortByFitness(population);
  const std::size_t survivors = std::max<std::size_t>(1, population.size() / 2);
  const std::size_t elites = std::min(config_.elite_count, population.size());
  const std::vector<std::size_t>& free = problem.space.free_features();

  // Random draws for each batch happen before its predictions.
  std::uniform_int_distribution<std::size_t> pick(0, survivors - 1);
  std::bernoulli_distribution crossover(config_.crossover_probability);
  std::bernoulli_distribution mutate(config_.mutation_probability);
  std::bernoulli_distribution swap(0.5);
  auto breed = [&](std::size_t count) {
    std::vector<Instance> children;
    children.reserve(count + 1);
    while (children.size() < count) {
      Instance a = population[pick(rng)].values;
      Instance b = population[pick(rng)].values;
      if (crossover(rng)) {
        for (std::size_t j : free) {
          if (swap(rng)) std::swap(a[j], b[j]);
        }
      }
      if (mutate(rng)) {
        problem.space.Mutate(a, config_.mutation_scale, config_.revert_probability, rng);
      }
      if (mutate(rng)) {
        problem.space.Mutate(b, config_.mutation_scale, config_.revert_probability, rng);
      }
      children.push_back(std::move(a));
      if (children.size() < count) children.push_back(std::move(b));
    }
    return children;
  };

  Population next;
  next.reserve(population_size_);
  for (std::size_t i = 0; i < elites; ++i) next.push_back(population[i]);
  auto deficit = [&] {
    return next.size() >= population_size_ ? std::size_t{0} : population_size_ - next.size();
  };

  // Infeasible offspring are replaced by further offspring, then by one
  // batch of fresh samples, and finally by surviving parents.
  constexpr int kBreedRounds = 4;
  for (int round = 0; round < kBreedRounds && deficit() > 0; ++round) {
    const std::size_t want = deficit();
    std::vector<Instance> children = breed(want);
    const std::size_t before = next.size();
    Score(problem, children, &next);
    outcome.rejected_offspring += want - (next.size() - before);
    if (round == 0 && next.size() == before) outcome.collapsed = true;
  }
  if (deficit() > 0) {
    std::vector<Instance> fresh;
    const std::size_t want = std::max<std::size_t>(deficit(), 64);
    for (std::size_t i = 0; i < want; ++i) fresh.push_back(problem.space.Sample(rng));
    outcome.fresh_samples = want;
    Score(problem, fresh, &next);
  }
  if (next.size() > population_size_) next.resize(population_size_);
  for (std::size_t i = 0; next.size() < population_size_; ++i) {
    next.push_back(population[i % survivors]);
  }
  population = std::move(next);
  return outcome;
}

std::vector<Counterfactual> GeneticEngine::SelectDiverse(const SearchProblem& problem,
                                                         Population& population, std::size_t k,
                                                         std::vector<std::string>* warnings) const {
  SortByFitness(population);
  std::vector<const Individual*> picked;
  std::set<std::vector<std::size_t>> seen;
  bool zero_distance = false;
  for (const Individual& ind : population) {
    if (picked.size() >= k) break;
    if (!std::isfinite(ind.distance)) continue;
    if (ind.distance == 0.0) {
      zero_distance = true;
      continue;
    }
    std::vector<std::size_t> changed = ChangedFeatures(problem.x, ind.values);
    if (!seen.insert(changed).second) continue;
    picked.push_back(&ind);
  }
  if (zero_distance) {
    warnings->push_back(
        "zero_distance: candidates indistinguishable from the input under the distance were "
        "skipped");
  }

  // Independent re-check of validity before reporting.
  std::vector<Instance> check;
  for (const Individual* ind : picked) check.push_back(ind->values);
  const std::vector<std::size_t> labels =
      check.empty() ? std::vector<std::size_t>{} : predictor_.PredictBatch(check);
  std::vector<Counterfactual> out;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    if (!problem.Accepts(labels[i])) {
      warnings->push_back("unstable_prediction: a candidate changed class on re-check");
      continue;
    }
    Counterfactual cf;
    cf.values = picked[i]->values;
    cf.distance = picked[i]->distance;
    cf.fitness = 1.0 / cf.distance;
    cf.predicted_class = labels[i];
    for (std::size_t j : ChangedFeatures(problem.x, cf.values)) {
      cf.changes.push_back(FeatureChange{j, problem.x[j], cf.values[j]});
    }
    out.push_back(std::move(cf));
  }
  if (out.size() < k) {
    warnings->push_back("shortfall: found " + std::to_string(out.size()) + " of " +
                        std::to_string(k) + " requested counterfactuals with distinct changes");
  }
  return out;
}

CounterfactualResult GeneticEngine::Generate(const Instance& x,
                                             const Constraints& constraints) const {
  const auto start = std::chrono::steady_clock::now();
  SearchProblem problem = MakeProblem(x, constraints);
  Rng rng(config_.seed);
  CounterfactualResult result;
  result.input = x;
  result.input_class = problem.input_class;

  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (config_.time_budget.count() > 0) deadline = start + config_.time_budget;
  Population population = InitializeUntil(problem, rng, deadline, nullptr);
  if (population.size() < population_size_) {
    result.warnings.push_back("sparse_init: only " + std::to_string(population.size()) + " of " +
                              std::to_string(population_size_) +
                              " initial individuals were feasible");
  }
  result.best_fitness_trace.push_back(BestFitness(population));
  bool collapse_noted = false;
  for (std::size_t g = 0; g < config_.generations; ++g) {
    if (config_.time_budget.count() > 0 &&
        std::chrono::steady_clock::now() - start >= config_.time_budget) {
      result.warnings.push_back("budget_exhausted: stopped after " + std::to_string(g) + " of " +
                                std::to_string(config_.generations) + " generations");
      break;
    }
    const EvolveOutcome outcome = Evolve(population, problem, rng);
    if (outcome.collapsed && !collapse_noted) {
      result.warnings.push_back("population_collapse: no feasible offspring at generation " +
                                std::to_string(g) + "; survivors carried over");
      collapse_noted = true;
    }
    result.best_fitness_trace.push_back(BestFitness(population));
    ++result.generations_run;
  }
  result.counterfactuals =
      SelectDiverse(problem, population, std::max<std::size_t>(1, constraints.k), &result.warnings);
  return result;
}

double GeneticEngine::FitnessOf(const Instance& x, const Instance& c) const {
  return Fitness(distance_(x, c));
}

}  // namespace cfaudit
