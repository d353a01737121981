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

#ifndef CFAUDIT_ADVERSARIAL_HPP_
#define CFAUDIT_ADVERSARIAL_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cfaudit/engine.hpp"
#include "cfaudit/image.hpp"
#include "cfaudit/predictor.hpp"

namespace cfaudit {

struct AdversarialOptions {
  // Each pixel may move at most this far from its input value. Uniform
  // sampling over the whole unit cube essentially never reaches a high SSIM,
  // so the search is boxed around the input.
  double radius = 0.25;
  std::size_t window = 0;  // 0 selects FitWindow(width, height)
  std::optional<std::size_t> target;
  GAConfig ga;
};

struct AdversarialResult {
  std::size_t input_class = 0;
  std::optional<Image> adversarial;
  std::size_t predicted_class = 0;
  double ssim = 0.0;
  double distance = 0.0;  // 1 / SSIM
  std::size_t changed_pixels = 0;
  std::vector<std::string> warnings;
};

// Image-mode counterfactual search under the SSIM distance. `f` receives
// pixel instances in row-major order.
AdversarialResult GenerateAdversarial(const Predictor& f, const Image& x,
                                      const AdversarialOptions& options);

}  // namespace cfaudit

#endif  // CFAUDIT_ADVERSARIAL_HPP_
