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

#ifndef CFAUDIT_EXTERNAL_PREDICTOR_HPP_
#define CFAUDIT_EXTERNAL_PREDICTOR_HPP_

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "cfaudit/predictor.hpp"
#include "cfaudit/schema.hpp"
#include "json.hpp"

namespace cfaudit {

struct ExternalOptions {
  std::chrono::milliseconds timeout{30000};  // per batch
  std::size_t max_batch = 1024;              // larger batches are chunked
};

// Forwards PredictBatch over the JSON wire protocol:
//   {"handshake":true}                      -> {"classes":[...]}
//   {"id":7,"instances":[[115.0,"a"],...]}  -> {"id":7,"labels":["1",...]}
// Requests on one connection are serialized.
class ExternalPredictor : public Predictor {
 public:
  ~ExternalPredictor() override = default;

  std::vector<std::size_t> PredictBatch(std::span<const Instance> xs) const override;
  const std::vector<std::string>& classes() const override { return schema_.classes(); }

 protected:
  ExternalPredictor(FeatureSchema schema, ExternalOptions options);

  // Performs the handshake; call from the derived constructor.
  void Handshake();
  // One request/response round trip. Throws kTransport on I/O failure or
  // timeout, kProtocol on an unparseable reply.
  virtual nlohmann::json Exchange(const nlohmann::json& request) const = 0;

  const ExternalOptions& options() const { return options_; }

 private:
  std::vector<std::size_t> PredictChunk(std::span<const Instance> xs) const;

  FeatureSchema schema_;
  ExternalOptions options_;
  mutable std::mutex mu_;
  mutable long long next_id_ = 1;
};

// Spawns `command` via /bin/sh and talks JSON lines over its stdin/stdout.
class StdioPredictor final : public ExternalPredictor {
 public:
  StdioPredictor(const std::string& command, FeatureSchema schema, ExternalOptions options = {});
  ~StdioPredictor() override;

 protected:
  nlohmann::json Exchange(const nlohmann::json& request) const override;

 private:
  int fd_ = -1;
  int pid_ = -1;
  mutable std::string buffer_;
};

// POSTs each request as JSON to http://host:port/path.
class HttpPredictor final : public ExternalPredictor {
 public:
  HttpPredictor(std::string host, int port, std::string path, FeatureSchema schema,
                ExternalOptions options = {});

 protected:
  nlohmann::json Exchange(const nlohmann::json& request) const override;

 private:
  std::string host_;
  int port_;
  std::string path_;
};

// Descriptor forms: "stdio:<shell command>" or "http://host:port[/path]"
// (path defaults to /predict).
std::unique_ptr<Predictor> ConnectExternal(std::string_view descriptor,
                                           const FeatureSchema& schema,
                                           ExternalOptions options = {});

}  // namespace cfaudit

#endif  // CFAUDIT_EXTERNAL_PREDICTOR_HPP_
