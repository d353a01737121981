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

#ifndef CFAUDIT_DATASET_HPP_
#define CFAUDIT_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cfaudit/schema.hpp"

namespace cfaudit {

struct FeatureStats {
  // Continuous features only.
  double median = 0.0;
  double mad = 0.0;
  double observed_min = 0.0;
  double observed_max = 0.0;
  double range() const { return observed_max - observed_min; }
  // Categorical features only; indexed by category code.
  std::vector<double> category_frequency;
};

// Training-data statistics that parameterize the mixed distance and the
// normalized robustness score.
struct DatasetStats {
  std::vector<FeatureStats> features;
  std::vector<double> class_priors;
  // Mean mixed distance between two rows of the same class; 0 for classes with
  // fewer than two rows.
  std::vector<double> intra_class_distance;
  // Standard error of each estimate; 0 when all pairs were enumerated.
  std::vector<double> intra_class_stderr;
  std::vector<bool> intra_class_sampled;

  // Per-feature divisor used by NormAbs: MAD, else half the observed range,
  // else 0 (feature contributes nothing).
  double Scale(std::size_t feature) const;
  // Sum_k P(class_k) * E[d | class_k].
  double ExpectedIntraClassDistance() const;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<Instance> rows;
  std::vector<std::size_t> labels;  // class index per row
  DatasetStats stats;

  std::size_t size() const { return rows.size(); }
};

// Classes above this size use sampled pairs for the intra-class distance.
inline constexpr std::size_t kExactPairLimit = 2000;
inline constexpr std::size_t kSampledPairs = 100000;
inline constexpr std::uint64_t kPairSamplingSeed = 0x5eed5eedULL;

DatasetStats ComputeStats(std::span<const Instance> rows,
                          std::span<const std::size_t> labels,
                          const FeatureSchema& schema);

// Header row must contain every feature plus the target column (any order).
Dataset ParseCsv(std::istream& in, const FeatureSchema& schema);
Dataset LoadCsv(const std::filesystem::path& path, const FeatureSchema& schema);
Dataset MakeDataset(FeatureSchema schema, std::vector<Instance> rows,
                    std::vector<std::size_t> labels);

// Writes the dataset back in the same CSV convention (schema column order,
// target last).
void WriteCsv(std::ostream& out, const Dataset& data);

}  // namespace cfaudit

#endif  // CFAUDIT_DATASET_HPP_
