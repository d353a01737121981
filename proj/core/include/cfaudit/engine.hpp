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

#ifndef CFAUDIT_ENGINE_HPP_
#define CFAUDIT_ENGINE_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cfaudit/constraints.hpp"
#include "cfaudit/distance.hpp"
#include "cfaudit/predictor.hpp"
#include "cfaudit/schema.hpp"

namespace cfaudit {

using Rng = std::mt19937_64;

inline constexpr std::size_t kMinPopulation = 100;
inline constexpr std::size_t kMaxPopulation = 30000;

// n^2 individuals, at least kMinPopulation, at most kMaxPopulation.
std::size_t DefaultPopulation(std::size_t num_features);

struct GAConfig {
  std::size_t population_size = 0;  // 0 selects DefaultPopulation(n)
  std::size_t generations = 300;
  double mutation_probability = 0.2;
  double crossover_probability = 0.5;
  std::size_t elite_count = 1;
  // Gaussian mutation sigma as a fraction of the constrained feature range.
  double mutation_scale = 0.1;
  // Chance that a mutated continuous feature snaps back to the input value
  // instead of receiving noise. Lets the search drop irrelevant changes.
  double revert_probability = 0.5;
  std::uint64_t seed = 0;
  // Rejection sampling gives up after multiplier * population draws.
  std::size_t init_attempt_multiplier = 100;
  // Wall-clock budget for a whole run; zero means unlimited.
  std::chrono::milliseconds time_budget{0};

  std::size_t ResolvedPopulation(std::size_t num_features) const;
  void Validate(std::size_t num_features) const;
};

struct Individual {
  Instance values;
  double distance = 0.0;
  std::size_t predicted = 0;
};
using Population = std::vector<Individual>;

// Per-feature domain of one search: fixed, a continuous interval, or a set of
// category codes.
struct FeatureDomain {
  bool fixed = false;
  bool continuous = true;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> choices;  // categorical codes
  bool contains_input = false;  // input value lies inside the domain
};

// The constrained space W for one input x.
class SearchSpace {
 public:
  SearchSpace(const FeatureSchema& schema, const Constraints& constraints, const Instance& x);

  const std::vector<FeatureDomain>& domains() const { return domains_; }
  const std::vector<std::size_t>& free_features() const { return free_; }
  bool Contains(const Instance& c) const;

  Instance Sample(Rng& rng) const;
  void Mutate(Instance& c, double scale, double revert_probability, Rng& rng) const;

 private:
  double Snap(std::size_t j, double v) const;

  const FeatureSchema* schema_;
  Instance x_;
  std::vector<FeatureDomain> domains_;
  std::vector<std::size_t> free_;
};

// Everything fixed for one counterfactual search.
struct SearchProblem {
  Instance x;
  std::size_t input_class = 0;
  std::optional<std::size_t> target;
  SearchSpace space;

  // Membership in I: prediction differs from f(x), and equals the target when
  // one is set.
  bool Accepts(std::size_t predicted) const {
    if (predicted == input_class) return false;
    return !target || predicted == *target;
  }
};

struct FeatureChange {
  std::size_t feature = 0;
  double from = 0.0;
  double to = 0.0;
};

struct Counterfactual {
  Instance values;
  double distance = 0.0;
  double fitness = 0.0;
  std::size_t predicted_class = 0;
  std::vector<FeatureChange> changes;
};

struct CounterfactualResult {
  Instance input;
  std::size_t input_class = 0;
  std::vector<Counterfactual> counterfactuals;
  std::vector<std::string> warnings;
  std::size_t generations_run = 0;
  // Best-of-population fitness after initialization and after each generation.
  std::vector<double> best_fitness_trace;
};

struct EvolveOutcome {
  bool collapsed = false;
  std::size_t rejected_offspring = 0;
  std::size_t fresh_samples = 0;
};

// Indices of features where c differs from x.
std::vector<std::size_t> ChangedFeatures(const Instance& x, const Instance& c);

class GeneticEngine {
 public:
  GeneticEngine(const FeatureSchema& schema, const Predictor& predictor, DistanceFn distance,
                GAConfig config);

  const GAConfig& config() const { return config_; }
  std::size_t population_size() const { return population_size_; }

  // Validates x and the constraints and evaluates f(x). Throws kValidation
  // when the target equals f(x), kInfeasibleSpace when nothing can change.
  SearchProblem MakeProblem(const Instance& x, const Constraints& constraints) const;

  // Rejection-samples W until population_size() members of I are found.
  // Throws kInfeasibleSpace when none turn up within the attempt budget.
  Population InitializePopulation(const SearchProblem& problem, Rng& rng,
                                  std::size_t* attempts = nullptr) const;

  // One generation: truncation selection, uniform crossover, mutation,
  // feasibility repair by rebreeding and fresh samples, elitism.
  EvolveOutcome Evolve(Population& population, const SearchProblem& problem, Rng& rng) const;

  // Full run seeded from config().seed; returns up to constraints.k
  // counterfactuals with pairwise-distinct changed-feature sets. When
  // config().time_budget runs out the best-so-far population is reported with
  // a "budget_exhausted" warning, or kBudgetExhausted is thrown if nothing
  // feasible was found yet.
  CounterfactualResult Generate(const Instance& x, const Constraints& constraints) const;

  // 1 / d(x, c). Throws kZeroDistance when c equals x under the distance.
  double FitnessOf(const Instance& x, const Instance& c) const;

 private:
  // Throws kBudgetExhausted when the deadline passes before any feasible
  // individual turns up.
  Population InitializeUntil(const SearchProblem& problem, Rng& rng,
                             std::optional<std::chrono::steady_clock::time_point> deadline,
                             std::size_t* attempts) const;
  void Score(const SearchProblem& problem, std::vector<Instance>& candidates,
             Population* accepted) const;
  std::vector<Counterfactual> SelectDiverse(const SearchProblem& problem,
                                            Population& population, std::size_t k,
                                            std::vector<std::string>* warnings) const;

  const FeatureSchema& schema_;
  const Predictor& predictor_;
  DistanceFn distance_;
  GAConfig config_;
  std::size_t population_size_;
};

}  // namespace cfaudit

#endif  // CFAUDIT_ENGINE_HPP_
