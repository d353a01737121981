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

#include "cfaudit/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "cfaudit/error.hpp"
#include "cfaudit/robust_stats.hpp"

namespace cfaudit {

using nlohmann::json;

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kDecisionTree: return "dtree";
  }
  return "unknown";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  if (name == "logreg") return ModelKind::kLogReg;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "dtree") return ModelKind::kDecisionTree;
  return std::nullopt;
}

void ModelConfig::Validate() const {
  if (epochs < 1) Fail(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) Fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "split fraction must lie in (0, 1)");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (max_depth < 1) Fail(ErrorCode::kInvalidArgument, "max depth must be >= 1");
  if (min_leaf < 1) Fail(ErrorCode::kInvalidArgument, "min leaf size must be >= 1");
  for (std::size_t h : hidden) {
    if (h == 0) Fail(ErrorCode::kInvalidArgument, "hidden layer sizes must be positive");
  }
}

// ---------------------------------------------------------------------------
// FeatureEncoder

FeatureEncoder FeatureEncoder::Fit(const FeatureSchema& schema,
                                   std::span<const Instance> rows, bool standardize) {
  FeatureEncoder enc;
  enc.standardize_ = standardize;
  const std::size_t n = schema.size();
  enc.continuous_.resize(n);
  enc.offset_.resize(n);
  enc.cardinality_.assign(n, 1);
  enc.mean_.assign(n, 0.0);
  enc.scale_.assign(n, 1.0);
  std::size_t width = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const FeatureSpec& f = schema.feature(j);
    enc.continuous_[j] = f.continuous();
    enc.offset_[j] = width;
    if (f.continuous()) {
      if (standardize && !rows.empty()) {
        double sum = 0.0;
        for (const Instance& x : rows) sum += x[j];
        const double mean = sum / static_cast<double>(rows.size());
        double ss = 0.0;
        for (const Instance& x : rows) ss += (x[j] - mean) * (x[j] - mean);
        const double sd = std::sqrt(ss / static_cast<double>(rows.size()));
        enc.mean_[j] = mean;
        enc.scale_[j] = sd > 0.0 ? sd : 1.0;
      }
      width += 1;
    } else {
      enc.cardinality_[j] = f.categories.size();
      width += f.categories.size();
    }
  }
  enc.width_ = width;
  return enc;
}

void FeatureEncoder::Encode(const Instance& x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < continuous_.size(); ++j) {
    if (continuous_[j]) {
      out[offset_[j]] = standardize_ ? (x[j] - mean_[j]) / scale_[j] : x[j];
    } else {
      out[offset_[j] + static_cast<std::size_t>(x[j])] = 1.0;
    }
  }
}

std::vector<double> FeatureEncoder::Encode(const Instance& x) const {
  std::vector<double> out(width_);
  Encode(x, out);
  return out;
}

json FeatureEncoder::ToJson() const {
  return json{{"standardize", standardize_}, {"mean", mean_}, {"scale", scale_}};
}

FeatureEncoder FeatureEncoder::FromJson(const FeatureSchema& schema, const json& doc) {
  FeatureEncoder enc = Fit(schema, {}, false);
  enc.standardize_ = doc.at("standardize").get<bool>();
  enc.mean_ = doc.at("mean").get<std::vector<double>>();
  enc.scale_ = doc.at("scale").get<std::vector<double>>();
  if (enc.mean_.size() != schema.size() || enc.scale_.size() != schema.size()) {
    Fail(ErrorCode::kParse, "encoder does not match schema");
  }
  return enc;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(FeatureSchema schema, FeatureEncoder encoder)
    : schema_(std::move(schema)), encoder_(std::move(encoder)) {}

std::vector<std::size_t> Model::PredictBatch(std::span<const Instance> xs) const {
  std::vector<std::size_t> out;
  out.reserve(xs.size());
  std::vector<double> buf(encoder_.width());
  for (const Instance& x : xs) {
    if (x.size() != schema_.size()) {
      Fail(ErrorCode::kValidation, "instance arity " + std::to_string(x.size()) +
                                       " does not match model arity " +
                                       std::to_string(schema_.size()));
    }
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      const FeatureSpec& f = schema_.feature(j);
      if (f.categorical() &&
          !(x[j] >= 0.0 && x[j] < static_cast<double>(f.categories.size()))) {
        Fail(ErrorCode::kValidation, f.name + ": invalid category code");
      }
    }
    encoder_.Encode(x, buf);
    out.push_back(PredictEncoded(buf));
  }
  return out;
}

json Model::ToJson() const {
  json doc;
  doc["format"] = "cfaudit-model";
  doc["version"] = 1;
  doc["kind"] = std::string(ModelKindName(kind()));
  doc["schema"] = SchemaToJson(schema_);
  doc["encoder"] = encoder_.ToJson();
  ParamsToJson(&doc);
  return doc;
}

// ---------------------------------------------------------------------------
// NeuralNetwork

NeuralNetwork::NeuralNetwork(FeatureSchema schema, FeatureEncoder encoder,
                             std::vector<Layer> layers, bool logistic)
    : Model(std::move(schema), std::move(encoder)),
      layers_(std::move(layers)),
      logistic_(logistic) {
  if (layers_.empty()) Fail(ErrorCode::kInvalidArgument, "network has no layers");
  std::size_t expected_in = this->encoder().width();
  for (const Layer& l : layers_) {
    if (l.inputs != expected_in || l.weights.size() != l.inputs * l.outputs ||
        l.bias.size() != l.outputs) {
      Fail(ErrorCode::kInvalidArgument, "inconsistent layer shapes");
    }
    expected_in = l.outputs;
  }
  if (layers_.back().outputs != classes().size()) {
    Fail(ErrorCode::kInvalidArgument, "output layer must have one unit per class");
  }
  if (logistic_ && layers_.size() != 1) {
    Fail(ErrorCode::kInvalidArgument, "logistic regression has exactly one layer");
  }
}

namespace {

void Affine(const NeuralNetwork::Layer& l, std::span<const double> in, std::vector<double>* out) {
  out->assign(l.bias.begin(), l.bias.end());
  for (std::size_t o = 0; o < l.outputs; ++o) {
    const double* w = &l.weights[o * l.inputs];
    double acc = (*out)[o];
    for (std::size_t i = 0; i < l.inputs; ++i) acc += w[i] * in[i];
    (*out)[o] = acc;
  }
}

// Numerically stable log-softmax cross-entropy for one sample; writes the
// softmax probabilities into `probs`.
double SoftmaxCrossEntropy(std::span<const double> logits, std::size_t label,
                           std::vector<double>* probs) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  probs->resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    (*probs)[k] = std::exp(logits[k] - m);
    z += (*probs)[k];
  }
  for (double& p : *probs) p /= z;
  return -(logits[label] - m - std::log(z));
}

}  // namespace

std::vector<double> NeuralNetwork::Logits(std::span<const double> encoded) const {
  std::vector<double> cur(encoded.begin(), encoded.end());
  std::vector<double> next;
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    Affine(layers_[li], cur, &next);
    if (li + 1 < layers_.size()) {
      for (double& v : next) v = std::max(0.0, v);
    }
    cur.swap(next);
  }
  return cur;
}

std::size_t NeuralNetwork::PredictEncoded(std::span<const double> encoded) const {
  return ArgMax(Logits(encoded));
}

double NeuralNetwork::Loss(std::span<const std::vector<double>> batch,
                           std::span<const std::size_t> labels) const {
  double total = 0.0;
  std::vector<double> probs;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    total += SoftmaxCrossEntropy(Logits(batch[s]), labels[s], &probs);
  }
  return total / static_cast<double>(batch.size());
}

double NeuralNetwork::LossAndGradient(std::span<const std::vector<double>> batch,
                                      std::span<const std::size_t> labels,
                                      std::vector<double>* gradient) const {
  std::vector<Layer> grads = layers_;
  for (Layer& g : grads) {
    std::fill(g.weights.begin(), g.weights.end(), 0.0);
    std::fill(g.bias.begin(), g.bias.end(), 0.0);
  }
  const std::size_t depth = layers_.size();
  std::vector<std::vector<double>> acts(depth + 1);  // acts[0] = input
  std::vector<double> probs;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double total = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    acts[0] = batch[s];
    for (std::size_t li = 0; li < depth; ++li) {
      Affine(layers_[li], acts[li], &acts[li + 1]);
      if (li + 1 < depth) {
        for (double& v : acts[li + 1]) v = std::max(0.0, v);
      }
    }
    total += SoftmaxCrossEntropy(acts[depth], labels[s], &probs);
    delta = probs;
    delta[labels[s]] -= 1.0;
    for (std::size_t li = depth; li-- > 0;) {
      const Layer& l = layers_[li];
      Layer& g = grads[li];
      const std::vector<double>& in = acts[li];
      for (std::size_t o = 0; o < l.outputs; ++o) {
        const double d = delta[o] * inv_n;
        g.bias[o] += d;
        double* gw = &g.weights[o * l.inputs];
        for (std::size_t i = 0; i < l.inputs; ++i) gw[i] += d * in[i];
      }
      if (li == 0) break;
      prev_delta.assign(l.inputs, 0.0);
      for (std::size_t o = 0; o < l.outputs; ++o) {
        const double* w = &l.weights[o * l.inputs];
        for (std::size_t i = 0; i < l.inputs; ++i) prev_delta[i] += w[i] * delta[o];
      }
      // ReLU derivative on the hidden activation feeding this layer.
      for (std::size_t i = 0; i < l.inputs; ++i) {
        if (in[i] <= 0.0) prev_delta[i] = 0.0;
      }
      delta.swap(prev_delta);
    }
  }
  gradient->clear();
  for (const Layer& g : grads) {
    gradient->insert(gradient->end(), g.weights.begin(), g.weights.end());
    gradient->insert(gradient->end(), g.bias.begin(), g.bias.end());
  }
  return total * inv_n;
}

std::vector<double> NeuralNetwork::Parameters() const {
  std::vector<double> p;
  for (const Layer& l : layers_) {
    p.insert(p.end(), l.weights.begin(), l.weights.end());
    p.insert(p.end(), l.bias.begin(), l.bias.end());
  }
  return p;
}

void NeuralNetwork::SetParameters(std::span<const double> params) {
  std::size_t pos = 0;
  for (Layer& l : layers_) {
    if (pos + l.weights.size() + l.bias.size() > params.size()) {
      Fail(ErrorCode::kInvalidArgument, "parameter vector too short");
    }
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(),
                l.weights.begin());
    pos += l.weights.size();
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(),
                l.bias.begin());
    pos += l.bias.size();
  }
  if (pos != params.size()) Fail(ErrorCode::kInvalidArgument, "parameter vector too long");
}

void NeuralNetwork::ParamsToJson(json* doc) const {
  json layers = json::array();
  for (const Layer& l : layers_) {
    layers.push_back(json{{"inputs", l.inputs},
                          {"outputs", l.outputs},
                          {"weights", l.weights},
                          {"bias", l.bias}});
  }
  (*doc)["layers"] = std::move(layers);
}

// ---------------------------------------------------------------------------
// DecisionTree

DecisionTree::DecisionTree(FeatureSchema schema, FeatureEncoder encoder,
                           std::vector<Node> nodes)
    : Model(std::move(schema), std::move(encoder)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) Fail(ErrorCode::kInvalidArgument, "tree has no nodes");
  const int count = static_cast<int>(nodes_.size());
  for (const Node& n : nodes_) {
    if (n.leaf()) {
      if (n.label >= classes().size()) Fail(ErrorCode::kInvalidArgument, "leaf label out of range");
    } else if (n.feature >= static_cast<int>(this->encoder().width()) || n.left <= 0 ||
               n.right <= 0 || n.left >= count || n.right >= count) {
      Fail(ErrorCode::kInvalidArgument, "malformed tree node");
    }
  }
}

std::size_t DecisionTree::PredictEncoded(std::span<const double> encoded) const {
  int idx = 0;
  while (!nodes_[static_cast<std::size_t>(idx)].leaf()) {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    idx = encoded[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(idx)].label;
}

std::vector<int> DecisionTree::Path(const Instance& x) const {
  const std::vector<double> enc = encoder().Encode(x);
  std::vector<int> path{0};
  int idx = 0;
  while (!nodes_[static_cast<std::size_t>(idx)].leaf()) {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    idx = enc[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    path.push_back(idx);
  }
  return path;
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(int)> rec = [&](int idx) -> std::size_t {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (n.leaf()) return 0;
    return 1 + std::max(rec(n.left), rec(n.right));
  };
  return rec(0);
}

void DecisionTree::ParamsToJson(json* doc) const {
  json nodes = json::array();
  for (const Node& n : nodes_) {
    if (n.leaf()) {
      nodes.push_back(json{{"leaf", n.label}});
    } else {
      nodes.push_back(json{{"feature", n.feature},
                           {"threshold", n.threshold},
                           {"left", n.left},
                           {"right", n.right}});
    }
  }
  (*doc)["nodes"] = std::move(nodes);
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::unique_ptr<Model> FitNetwork(const FeatureSchema& schema, std::span<const Instance> rows,
                                  std::span<const std::size_t> labels,
                                  const ModelConfig& config) {
  const bool logistic = config.kind == ModelKind::kLogReg;
  FeatureEncoder enc = FeatureEncoder::Fit(schema, rows, /*standardize=*/true);
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> sizes{enc.width()};
  if (!logistic) sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(schema.classes().size());
  std::vector<NeuralNetwork::Layer> layers;
  for (std::size_t li = 0; li + 1 < sizes.size(); ++li) {
    NeuralNetwork::Layer l;
    l.inputs = sizes[li];
    l.outputs = sizes[li + 1];
    const bool output = li + 2 == sizes.size();
    const double sd = std::sqrt((output ? 1.0 : 2.0) / static_cast<double>(l.inputs));
    std::normal_distribution<double> init(0.0, sd);
    l.weights.resize(l.inputs * l.outputs);
    for (double& w : l.weights) w = init(rng);
    l.bias.assign(l.outputs, 0.0);
    layers.push_back(std::move(l));
  }
  auto net = std::make_unique<NeuralNetwork>(schema, enc, std::move(layers), logistic);

  std::vector<std::vector<double>> encoded;
  encoded.reserve(rows.size());
  for (const Instance& x : rows) encoded.push_back(enc.Encode(x));

  constexpr double kMomentum = 0.9;
  std::vector<double> params = net->Parameters();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad;
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> batch;
  std::vector<std::size_t> batch_labels;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(encoded[order[i]]);
        batch_labels.push_back(labels[order[i]]);
      }
      const double loss = net->LossAndGradient(batch, batch_labels, &grad);
      if (!std::isfinite(loss)) {
        Fail(ErrorCode::kTraining,
             "non-finite loss at epoch " + std::to_string(epoch) + "; lower the learning rate");
      }
      epoch_loss += loss;
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = kMomentum * velocity[p] - config.learning_rate * grad[p];
        params[p] += velocity[p];
      }
      net->SetParameters(params);
    }
    if (!std::isfinite(epoch_loss)) {
      Fail(ErrorCode::kTraining, "non-finite loss at epoch " + std::to_string(epoch));
    }
  }
  return net;
}

double Gini(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& x, std::span<const std::size_t> y,
              std::size_t num_classes, const ModelConfig& config)
      : x_(x), y_(y), num_classes_(num_classes), config_(config) {}

  std::vector<DecisionTree::Node> Build() {
    std::vector<std::size_t> idx(y_.size());
    std::iota(idx.begin(), idx.end(), 0);
    nodes_.clear();
    Grow(idx, 0);
    return std::move(nodes_);
  }

 private:
  std::size_t Majority(std::span<const std::size_t> idx) const {
    std::vector<std::size_t> counts(num_classes_, 0);
    for (std::size_t i : idx) ++counts[y_[i]];
    std::size_t best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k) {
      if (counts[k] > counts[best]) best = k;
    }
    return best;
  }

  int Grow(std::vector<std::size_t> idx, std::size_t depth) {
    const int me = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    DecisionTree::Node leaf;
    leaf.label = Majority(idx);

    std::vector<std::size_t> counts(num_classes_, 0);
    for (std::size_t i : idx) ++counts[y_[i]];
    const double parent = Gini(counts, idx.size());
    if (depth >= config_.max_depth || parent == 0.0 || idx.size() < 2 * config_.min_leaf) {
      nodes_[static_cast<std::size_t>(me)] = leaf;
      return me;
    }

    const std::size_t width = x_.front().size();
    double best_score = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = idx;
    std::vector<std::size_t> left(num_classes_);
    std::vector<std::size_t> right(num_classes_);
    for (std::size_t f = 0; f < width; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x_[a][f] != x_[b][f]) return x_[a][f] < x_[b][f];
        return a < b;
      });
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const std::size_t i = order[pos];
        ++left[y_[i]];
        --right[y_[i]];
        const double v = x_[i][f];
        const double next = x_[order[pos + 1]][f];
        if (v == next) continue;
        const std::size_t nl = pos + 1;
        const std::size_t nr = order.size() - nl;
        if (nl < config_.min_leaf || nr < config_.min_leaf) continue;
        const double score = (static_cast<double>(nl) * Gini(left, nl) +
                              static_cast<double>(nr) * Gini(right, nr)) /
                             static_cast<double>(order.size());
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (v + next);
        }
      }
    }
    if (best_feature < 0) {
      nodes_[static_cast<std::size_t>(me)] = leaf;
      return me;
    }
    std::vector<std::size_t> lo;
    std::vector<std::size_t> hi;
    for (std::size_t i : idx) {
      (x_[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? lo : hi).push_back(i);
    }
    const int l = Grow(std::move(lo), depth + 1);
    const int r = Grow(std::move(hi), depth + 1);
    DecisionTree::Node& node = nodes_[static_cast<std::size_t>(me)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    node.label = leaf.label;
    return me;
  }

  const std::vector<std::vector<double>>& x_;
  std::span<const std::size_t> y_;
  std::size_t num_classes_;
  const ModelConfig& config_;
  std::vector<DecisionTree::Node> nodes_;
};

std::unique_ptr<Model> FitTree(const FeatureSchema& schema, std::span<const Instance> rows,
                               std::span<const std::size_t> labels, const ModelConfig& config) {
  FeatureEncoder enc = FeatureEncoder::Fit(schema, rows, /*standardize=*/false);
  std::vector<std::vector<double>> encoded;
  encoded.reserve(rows.size());
  for (const Instance& x : rows) encoded.push_back(enc.Encode(x));
  TreeBuilder builder(encoded, labels, schema.classes().size(), config);
  return std::make_unique<DecisionTree>(schema, enc, builder.Build());
}

}  // namespace

std::unique_ptr<Model> Fit(const FeatureSchema& schema, std::span<const Instance> rows,
                           std::span<const std::size_t> labels, const ModelConfig& config) {
  config.Validate();
  if (rows.empty() || rows.size() != labels.size()) {
    Fail(ErrorCode::kInvalidArgument, "training rows and labels must be non-empty and aligned");
  }
  if (config.kind == ModelKind::kDecisionTree) return FitTree(schema, rows, labels, config);
  return FitNetwork(schema, rows, labels, config);
}

double Accuracy(const Predictor& model, std::span<const Instance> rows,
                std::span<const std::size_t> labels) {
  if (rows.empty()) return 0.0;
  const std::vector<std::size_t> pred = model.PredictBatch(rows);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

TrainResult Train(const Dataset& data, const ModelConfig& config) {
  config.Validate();
  const std::set<std::size_t> present(data.labels.begin(), data.labels.end());
  if (present.size() < 2) {
    Fail(ErrorCode::kTraining, "dataset contains a single class; nothing to learn");
  }
  if (data.size() < 2) Fail(ErrorCode::kTraining, "need at least two rows to split");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(DeriveSeed(config.seed, 0x73706c6974ULL));
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_test = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(data.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, data.size() - 1);

  TrainResult result;
  result.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::sort(result.test_indices.begin(), result.test_indices.end());
  std::vector<Instance> train_x;
  std::vector<std::size_t> train_y;
  std::vector<Instance> test_x;
  std::vector<std::size_t> test_y;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t r = order[i];
    if (i < n_test) {
      test_x.push_back(data.rows[r]);
      test_y.push_back(data.labels[r]);
    } else {
      train_x.push_back(data.rows[r]);
      train_y.push_back(data.labels[r]);
    }
  }
  result.model = Fit(data.schema, train_x, train_y, config);
  result.test_accuracy = Accuracy(*result.model, test_x, test_y);
  result.train_size = train_x.size();
  result.test_size = test_x.size();
  return result;
}

std::unique_ptr<Model> ModelFromJson(const json& doc) {
  try {
    if (doc.value("format", "") != "cfaudit-model") {
      Fail(ErrorCode::kParse, "not a cfaudit model document");
    }
    const auto kind = ParseModelKind(doc.at("kind").get<std::string>());
    if (!kind) Fail(ErrorCode::kParse, "unsupported model kind");
    FeatureSchema schema = SchemaFromJson(doc.at("schema"));
    FeatureEncoder enc = FeatureEncoder::FromJson(schema, doc.at("encoder"));
    if (*kind == ModelKind::kDecisionTree) {
      std::vector<DecisionTree::Node> nodes;
      for (const json& jn : doc.at("nodes")) {
        DecisionTree::Node n;
        if (jn.contains("leaf")) {
          n.label = jn.at("leaf").get<std::size_t>();
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        nodes.push_back(n);
      }
      return std::make_unique<DecisionTree>(std::move(schema), std::move(enc), std::move(nodes));
    }
    std::vector<NeuralNetwork::Layer> layers;
    for (const json& jl : doc.at("layers")) {
      NeuralNetwork::Layer l;
      l.inputs = jl.at("inputs").get<std::size_t>();
      l.outputs = jl.at("outputs").get<std::size_t>();
      l.weights = jl.at("weights").get<std::vector<double>>();
      l.bias = jl.at("bias").get<std::vector<double>>();
      layers.push_back(std::move(l));
    }
    return std::make_unique<NeuralNetwork>(std::move(schema), std::move(enc), std::move(layers),
                                           *kind == ModelKind::kLogReg);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("model: ") + e.what());
  }
}

void SaveModel(const std::filesystem::path& path, const Model& model, const json& metrics) {
  json doc = model.ToJson();
  if (!metrics.is_null()) doc["metrics"] = metrics;
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kNotFound, "cannot write model file " + path.string());
  out << doc.dump() << '\n';
}

namespace {

json ReadModelDocument(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open model file " + path.string());
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace

std::unique_ptr<Model> LoadModel(const std::filesystem::path& path) {
  return ModelFromJson(ReadModelDocument(path));
}

json LoadModelMetrics(const std::filesystem::path& path) {
  const json doc = ReadModelDocument(path);
  return doc.contains("metrics") ? doc["metrics"] : json(nullptr);
}

}  // namespace cfaudit
