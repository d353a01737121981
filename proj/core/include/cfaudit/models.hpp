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

#ifndef CFAUDIT_MODELS_HPP_
#define CFAUDIT_MODELS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cfaudit/dataset.hpp"
#include "cfaudit/predictor.hpp"
#include "json.hpp"

namespace cfaudit {

enum class ModelKind { kLogReg, kMlp, kDecisionTree };

std::string_view ModelKindName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);

struct ModelConfig {
  ModelKind kind = ModelKind::kMlp;
  // Network settings (logreg ignores `hidden`).
  std::vector<std::size_t> hidden = {20, 20};
  double learning_rate = 0.05;
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
  // Decision tree settings.
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  // Held-out fraction for the reported accuracy.
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Maps raw instances onto the numeric vector a built-in model consumes.
// Continuous features are optionally standardized; categorical features are
// one-hot encoded. Invisible outside the model.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;
  static FeatureEncoder Fit(const FeatureSchema& schema, std::span<const Instance> rows,
                            bool standardize);

  std::size_t width() const { return width_; }
  void Encode(const Instance& x, std::span<double> out) const;
  std::vector<double> Encode(const Instance& x) const;

  nlohmann::json ToJson() const;
  static FeatureEncoder FromJson(const FeatureSchema& schema, const nlohmann::json& doc);

 private:
  std::vector<bool> continuous_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> cardinality_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  bool standardize_ = false;
  std::size_t width_ = 0;
};

// A trained, immutable built-in classifier.
class Model : public Predictor {
 public:
  Model(FeatureSchema schema, FeatureEncoder encoder);

  std::vector<std::size_t> PredictBatch(std::span<const Instance> xs) const override;
  const std::vector<std::string>& classes() const override { return schema_.classes(); }

  const FeatureSchema& schema() const { return schema_; }
  const FeatureEncoder& encoder() const { return encoder_; }

  virtual ModelKind kind() const = 0;
  virtual std::size_t PredictEncoded(std::span<const double> encoded) const = 0;
  // Full model document including schema and encoder.
  nlohmann::json ToJson() const;

 protected:
  virtual void ParamsToJson(nlohmann::json* doc) const = 0;

 private:
  FeatureSchema schema_;
  FeatureEncoder encoder_;
};

// Fully connected network: ReLU hidden layers, softmax output. With no
// hidden layers it is multinomial logistic regression.
class NeuralNetwork : public Model {
 public:
  struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;
  };

  NeuralNetwork(FeatureSchema schema, FeatureEncoder encoder, std::vector<Layer> layers,
                bool logistic);

  ModelKind kind() const override {
    return logistic_ ? ModelKind::kLogReg : ModelKind::kMlp;
  }
  std::size_t PredictEncoded(std::span<const double> encoded) const override;

  // Output-layer logits.
  std::vector<double> Logits(std::span<const double> encoded) const;

  // Mean softmax cross-entropy over the batch and its gradient with respect
  // to Parameters() (same flat layout).
  double Loss(std::span<const std::vector<double>> batch,
              std::span<const std::size_t> labels) const;
  double LossAndGradient(std::span<const std::vector<double>> batch,
                         std::span<const std::size_t> labels,
                         std::vector<double>* gradient) const;

  // Flattened weights then bias, layer by layer.
  std::vector<double> Parameters() const;
  void SetParameters(std::span<const double> params);

  const std::vector<Layer>& layers() const { return layers_; }

 protected:
  void ParamsToJson(nlohmann::json* doc) const override;

 private:
  std::vector<Layer> layers_;
  bool logistic_;
};

// CART classifier (Gini impurity) over raw continuous values and one-hot
// categorical indicators.
class DecisionTree : public Model {
 public:
  struct Node {
    // Internal node: go left when encoded[feature] <= threshold.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    // Leaf payload.
    std::size_t label = 0;

    bool leaf() const { return feature < 0; }
  };

  DecisionTree(FeatureSchema schema, FeatureEncoder encoder, std::vector<Node> nodes);

  ModelKind kind() const override { return ModelKind::kDecisionTree; }
  std::size_t PredictEncoded(std::span<const double> encoded) const override;
  // Node indices visited from the root to the leaf.
  std::vector<int> Path(const Instance& x) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;

 protected:
  void ParamsToJson(nlohmann::json* doc) const override;

 private:
  std::vector<Node> nodes_;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  double test_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<std::size_t> test_indices;  // rows of the held-out split
};

// Seeded shuffle then split; reproducible for a given config.
TrainResult Train(const Dataset& data, const ModelConfig& config);

// Train on exactly these rows (used by Train and by tests).
std::unique_ptr<Model> Fit(const FeatureSchema& schema, std::span<const Instance> rows,
                           std::span<const std::size_t> labels, const ModelConfig& config);

double Accuracy(const Predictor& model, std::span<const Instance> rows,
                std::span<const std::size_t> labels);

std::unique_ptr<Model> ModelFromJson(const nlohmann::json& doc);
// `metrics` (e.g. {"test_accuracy":..,"test_rows":[..]}) is stored verbatim
// when not null.
void SaveModel(const std::filesystem::path& path, const Model& model,
               const nlohmann::json& metrics = nullptr);
std::unique_ptr<Model> LoadModel(const std::filesystem::path& path);
// The "metrics" object of a model file, or null.
nlohmann::json LoadModelMetrics(const std::filesystem::path& path);

}  // namespace cfaudit

#endif  // CFAUDIT_MODELS_HPP_
