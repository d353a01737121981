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

#ifndef CFAUDIT_SERVICE_HPP_
#define CFAUDIT_SERVICE_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "cfaudit/dataset.hpp"
#include "cfaudit/engine.hpp"
#include "cfaudit/error.hpp"
#include "cfaudit/external_predictor.hpp"
#include "cfaudit/predictor.hpp"
#include "json.hpp"

namespace cfaudit {

struct ServiceOptions {
  GAConfig ga;  // defaults for every generation; ga.seed is the default seed
  std::chrono::milliseconds time_budget{60000};  // per counterfactual request
  std::size_t audit_workers = 1;
  ExternalOptions external;
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

// HTTP status for a library error code.
int HttpStatusFor(ErrorCode code);

// Routes under /v1:
//   GET   /healthz
//   POST  /datasets                      {"id","schema":{..}|"path","csv":"path"}
//   POST  /models                        {"id","dataset","path"|"endpoint"}
//   POST  /sessions                      {"model","instance":[..]}
//   PATCH /sessions/{id}/constraints     feature-keyed constraint patch
//   POST  /sessions/{id}/counterfactuals {"k","target","seed"}
//   POST  /audits/{kind}                 kind: robustness|burden|importance|individual_fairness
//   GET   /jobs/{id}
// Errors are {"error":{"code":..,"detail":..}}.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ServiceResponse Handle(std::string_view method, std::string_view path, std::string_view body);

  void AddDataset(const std::string& id, Dataset data);
  // The dataset supplies schema and distance statistics for the model.
  void AddModel(const std::string& id, std::shared_ptr<const Predictor> predictor,
                const std::string& dataset_id);

  // {"datasets":[{"id","schema","csv"}],"models":[{"id","dataset","path"|"endpoint"}]}
  // Relative paths resolve against `base`.
  void Preload(const nlohmann::json& manifest, const std::filesystem::path& base);

  // Sessions with their histories; restorable while the referenced models are
  // loaded.
  nlohmann::json Snapshot() const;
  void Restore(const nlohmann::json& snapshot);

  // Blocks until no audit job is queued or running.
  void WaitForJobs();
  // Lets running jobs finish and cancels queued ones. Idempotent.
  void Shutdown();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Binds a Service to an HTTP listener.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Returns the bound port (pass 0 for an ephemeral one). Throws kTransport
  // when the address is unavailable.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); returns after in-flight requests complete.
  void Run();
  void Stop();
  // Called once per request with a JSON log line.
  void SetLogger(std::function<void(const std::string&)> logger);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cfaudit

#endif  // CFAUDIT_SERVICE_HPP_
