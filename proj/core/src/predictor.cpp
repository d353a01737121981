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

#include "cfaudit/predictor.hpp"

#include "cfaudit/error.hpp"

namespace cfaudit {

std::size_t Predictor::Predict(const Instance& x) const {
  return PredictBatch(std::span<const Instance>(&x, 1)).at(0);
}

std::vector<std::string> Predictor::PredictLabels(std::span<const Instance> xs) const {
  std::vector<std::string> out;
  out.reserve(xs.size());
  for (std::size_t idx : PredictBatch(xs)) out.push_back(classes().at(idx));
  return out;
}

FunctionPredictor::FunctionPredictor(std::vector<std::string> classes, Fn fn)
    : classes_(std::move(classes)), fn_(std::move(fn)) {
  if (classes_.size() < 2) Fail(ErrorCode::kInvalidArgument, "predictor needs >= 2 classes");
}

std::vector<std::size_t> FunctionPredictor::PredictBatch(std::span<const Instance> xs) const {
  std::vector<std::size_t> out;
  out.reserve(xs.size());
  for (const Instance& x : xs) {
    const std::size_t label = fn_(x);
    if (label >= classes_.size()) Fail(ErrorCode::kInternal, "predictor label out of range");
    out.push_back(label);
  }
  return out;
}

std::size_t ArgMax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace cfaudit
