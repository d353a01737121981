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

#include "cfaudit/adversarial.hpp"

#include <algorithm>

#include "cfaudit/constraints.hpp"
#include "cfaudit/error.hpp"

namespace cfaudit {

AdversarialResult GenerateAdversarial(const Predictor& f, const Image& x,
                                      const AdversarialOptions& options) {
  ValidateImage(x);
  if (!(options.radius > 0.0)) Fail(ErrorCode::kInvalidArgument, "radius must be positive");
  const std::size_t window =
      options.window == 0 ? FitWindow(x.width, x.height) : options.window;
  const FeatureSchema schema = PixelSchema(x.width, x.height, f.classes());
  const Instance input = InstanceFromImage(x);

  Constraints c;
  c.target = options.target;
  for (std::size_t j = 0; j < input.size(); ++j) {
    const double lo = std::max(0.0, input[j] - options.radius);
    const double hi = std::min(1.0, input[j] + options.radius);
    c.ranges[j] = {lo, hi};
  }
  const GeneticEngine engine(schema, f, MakeSsimDistance(x.width, x.height, window), options.ga);
  const CounterfactualResult r = engine.Generate(input, c);

  AdversarialResult out;
  out.input_class = r.input_class;
  out.warnings = r.warnings;
  if (!r.counterfactuals.empty()) {
    const Counterfactual& best = r.counterfactuals.front();
    out.adversarial = ImageFromInstance(best.values, x.width, x.height);
    out.predicted_class = best.predicted_class;
    out.distance = best.distance;
    out.ssim = Ssim(x, *out.adversarial, window);
    out.changed_pixels = best.changes.size();
  }
  return out;
}

}  // namespace cfaudit
