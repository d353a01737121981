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

#ifndef CFAUDIT_PREDICTOR_HPP_
#define CFAUDIT_PREDICTOR_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cfaudit/schema.hpp"

namespace cfaudit {

// Black-box classifier contract. Labels are reported as indices into
// classes(). Implementations must be safe for concurrent PredictBatch calls.
class Predictor {
 public:
  virtual ~Predictor() = default;

  // Exactly one class index per input, in input order.
  virtual std::vector<std::size_t> PredictBatch(std::span<const Instance> xs) const = 0;
  virtual const std::vector<std::string>& classes() const = 0;
  virtual bool deterministic() const { return true; }

  std::size_t Predict(const Instance& x) const;
  std::vector<std::string> PredictLabels(std::span<const Instance> xs) const;
};

// Wraps a plain function; used for constructed oracle models and image
// classifiers defined in code.
class FunctionPredictor : public Predictor {
 public:
  using Fn = std::function<std::size_t(const Instance&)>;

  FunctionPredictor(std::vector<std::string> classes, Fn fn);

  std::vector<std::size_t> PredictBatch(std::span<const Instance> xs) const override;
  const std::vector<std::string>& classes() const override { return classes_; }

 private:
  std::vector<std::string> classes_;
  Fn fn_;
};

// Index of the maximum score; ties go to the lowest index.
std::size_t ArgMax(std::span<const double> scores);

}  // namespace cfaudit

#endif  // CFAUDIT_PREDICTOR_HPP_
