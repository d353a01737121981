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

#ifndef CFAUDIT_TESTS_SUPPORT_FIXTURES_HPP_
#define CFAUDIT_TESTS_SUPPORT_FIXTURES_HPP_

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cfaudit/dataset.hpp"
#include "cfaudit/predictor.hpp"
#include "cfaudit/schema.hpp"

namespace cfaudit::testing {

inline FeatureSpec Continuous(std::string name, double lo, double hi, bool is_mutable = true) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = FeatureKind::kContinuous;
  f.min = lo;
  f.max = hi;
  f.is_mutable = is_mutable;
  return f;
}

inline FeatureSpec Stepped(std::string name, double lo, double hi, double step) {
  FeatureSpec f = Continuous(std::move(name), lo, hi);
  f.step = step;
  return f;
}

inline FeatureSpec Categorical(std::string name, std::vector<std::string> categories,
                               bool is_mutable = true) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = FeatureKind::kCategorical;
  f.categories = std::move(categories);
  f.is_mutable = is_mutable;
  return f;
}

// income [0,100], debt [0,50], region {north,south,east}, group {a,b}
// (immutable); classes deny/approve with approve favorable.
inline FeatureSchema MixedSchema() {
  return FeatureSchema({Continuous("income", 0, 100), Continuous("debt", 0, 50),
                        Categorical("region", {"north", "south", "east"}),
                        Categorical("group", {"a", "b"}, /*is_mutable=*/false)},
                       "decision", {"deny", "approve"}, "approve");
}

// approve iff income - debt >= 20 (region and group ignored).
inline std::shared_ptr<Predictor> MixedPredictor() {
  return std::make_shared<FunctionPredictor>(
      std::vector<std::string>{"deny", "approve"},
      [](const Instance& x) -> std::size_t { return x[0] - x[1] >= 20.0 ? 1 : 0; });
}

// Random rows labelled by MixedPredictor.
inline Dataset MixedDataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> income(0, 100), debt(0, 50);
  std::uniform_int_distribution<int> region(0, 2), group(0, 1);
  std::vector<Instance> rows;
  std::vector<std::size_t> labels;
  const auto f = MixedPredictor();
  for (std::size_t i = 0; i < n; ++i) {
    Instance x{{income(rng), debt(rng), static_cast<double>(region(rng)),
                static_cast<double>(group(rng))}};
    labels.push_back(f->Predict(x));
    rows.push_back(std::move(x));
  }
  return MakeDataset(MixedSchema(), std::move(rows), std::move(labels));
}

inline std::shared_ptr<Predictor> Threshold(std::size_t feature, double t) {
  return std::make_shared<FunctionPredictor>(
      std::vector<std::string>{"0", "1"},
      [feature, t](const Instance& x) -> std::size_t { return x[feature] >= t ? 1 : 0; });
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "cfaudit-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path Write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace cfaudit::testing

#endif  // CFAUDIT_TESTS_SUPPORT_FIXTURES_HPP_
