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

#include "cfaudit/service.hpp"

#include <condition_variable>
#include <ctime>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "cfaudit/audit.hpp"
#include "cfaudit/constraints.hpp"
#include "cfaudit/distance.hpp"
#include "cfaudit/models.hpp"
#include "cfaudit/report_io.hpp"
#include "httplib.h"

namespace cfaudit {

using nlohmann::json;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInfeasibleSpace: return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kValidation:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kZeroDistance: return 422;
    case ErrorCode::kTransport:
    case ErrorCode::kProtocol: return 502;
    case ErrorCode::kBudgetExhausted: return 504;
    case ErrorCode::kTraining:
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

namespace {

// Raised for request-level problems that have no library error code.
struct HttpError {
  int status;
  std::string code;
  std::string detail;
  json fields = nullptr;
};

ServiceResponse ErrorResponse(int status, const std::string& code, const std::string& detail,
                              const json& fields = nullptr) {
  json err = {{"code", code}, {"detail", detail}};
  if (!fields.is_null()) err["fields"] = fields;
  return {status, {{"error", std::move(err)}}};
}

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = path.find('/', i);
    const std::size_t end = j == std::string_view::npos ? path.size() : j;
    if (end > i) parts.emplace_back(path.substr(i, end - i));
    i = end;
  }
  return parts;
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RequireString(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string() || body[key].get<std::string>().empty()) {
    throw HttpError{422, std::string(ErrorCodeName(ErrorCode::kValidation)),
                    std::string("'") + key + "' must be a non-empty string"};
  }
  return body[key].get<std::string>();
}

template <typename T>
T OptionalField(const json& body, const char* key, T fallback) {
  if (!body.contains(key) || body[key].is_null()) return fallback;
  try {
    return body[key].get<T>();
  } catch (const json::exception&) {
    throw HttpError{422, std::string(ErrorCodeName(ErrorCode::kValidation)),
                    std::string("field '") + key + "' has the wrong type"};
  }
}

std::vector<std::string> NameList(const json& body, const char* key) {
  if (!body.contains(key)) return {};
  const json& v = body[key];
  if (v.is_string()) return {v.get<std::string>()};
  return OptionalField<std::vector<std::string>>(body, key, {});
}

std::optional<std::size_t> ClassField(const FeatureSchema& schema, const json& body,
                                      const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_string()) Fail(ErrorCode::kValidation, std::string(key) + " must be a class label");
  const auto idx = schema.ClassIndex(body[key].get<std::string>());
  if (!idx) Fail(ErrorCode::kValidation, "unknown class '" + body[key].get<std::string>() + "'");
  return idx;
}

struct DatasetEntry {
  Dataset data;
  DistanceFn distance;
};

struct ModelEntry {
  std::string id;
  std::string dataset_id;
  std::shared_ptr<const Predictor> predictor;
  std::shared_ptr<const DatasetEntry> dataset;
};

struct Session {
  std::string id;
  std::shared_ptr<const ModelEntry> model;
  Instance x;
  Constraints constraints;
  json history = json::array();
  mutable std::mutex mu;  // serializes requests within the session
};

struct JobRecord {
  std::string id;
  std::string kind;
  mutable std::mutex mu;
  std::shared_ptr<const json> view;  // published snapshot

  void Publish(json v) {
    auto next = std::make_shared<const json>(std::move(v));
    std::lock_guard lock(mu);
    view = std::move(next);
  }
  std::shared_ptr<const json> Read() const {
    std::lock_guard lock(mu);
    return view;
  }
};

}  // namespace

struct Service::Impl {
  ServiceOptions options;

  mutable std::shared_mutex registry_mu;
  std::map<std::string, std::shared_ptr<const DatasetEntry>> datasets;
  std::map<std::string, std::shared_ptr<const ModelEntry>> models;

  mutable std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::size_t next_session = 1;

  std::mutex jobs_mu;
  std::condition_variable jobs_cv;
  std::condition_variable idle_cv;
  std::map<std::string, std::shared_ptr<JobRecord>> jobs;
  std::deque<std::pair<std::shared_ptr<JobRecord>, std::function<json()>>> queue;
  std::size_t next_job = 1;
  std::size_t running = 0;
  bool stopping = false;
  std::vector<std::thread> workers;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    const std::size_t n = std::max<std::size_t>(options.audit_workers, 1);
    for (std::size_t i = 0; i < n; ++i) workers.emplace_back([this] { WorkerLoop(); });
  }

  void WorkerLoop() {
    for (;;) {
      std::shared_ptr<JobRecord> job;
      std::function<json()> task;
      {
        std::unique_lock lock(jobs_mu);
        jobs_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (queue.empty()) return;
        job = std::move(queue.front().first);
        task = std::move(queue.front().second);
        queue.pop_front();
        ++running;
      }
      job->Publish({{"id", job->id}, {"kind", job->kind}, {"status", "running"}});
      json view = {{"id", job->id}, {"kind", job->kind}};
      try {
        view["report"] = task();
        view["status"] = "done";
      } catch (const Error& e) {
        view["status"] = "failed";
        view["error"] = {{"code", ErrorCodeName(e.code())}, {"detail", e.what()}};
      } catch (const std::exception& e) {
        view["status"] = "failed";
        view["error"] = {{"code", ErrorCodeName(ErrorCode::kInternal)}, {"detail", e.what()}};
      }
      job->Publish(std::move(view));
      {
        std::lock_guard lock(jobs_mu);
        --running;
      }
      idle_cv.notify_all();
    }
  }

  void Shutdown() {
    std::deque<std::pair<std::shared_ptr<JobRecord>, std::function<json()>>> cancelled;
    {
      std::lock_guard lock(jobs_mu);
      if (stopping && workers.empty()) return;
      stopping = true;
      cancelled.swap(queue);
    }
    for (auto& [job, task] : cancelled) {
      job->Publish({{"id", job->id},
                    {"kind", job->kind},
                    {"status", "failed"},
                    {"error", {{"code", "cancelled"}, {"detail", "service shutting down"}}}});
    }
    jobs_cv.notify_all();
    idle_cv.notify_all();
    for (std::thread& t : workers) t.join();
    workers.clear();
  }

  std::string Enqueue(const std::string& kind, std::function<json()> task) {
    auto job = std::make_shared<JobRecord>();
    job->kind = kind;
    {
      std::lock_guard lock(jobs_mu);
      if (stopping) throw HttpError{503, "unavailable", "service shutting down"};
      job->id = "j" + std::to_string(next_job++);
      job->Publish({{"id", job->id}, {"kind", kind}, {"status", "queued"}});
      jobs[job->id] = job;
      queue.emplace_back(job, std::move(task));
    }
    jobs_cv.notify_one();
    return job->id;
  }

  // Registry -------------------------------------------------------------

  void AddDataset(const std::string& id, Dataset data) {
    if (id.empty()) Fail(ErrorCode::kValidation, "dataset id must be non-empty");
    auto entry = std::make_shared<DatasetEntry>();
    entry->data = std::move(data);
    entry->distance = MixedDistance(entry->data.schema, entry->data.stats);
    std::unique_lock lock(registry_mu);
    if (datasets.count(id)) throw HttpError{409, "conflict", "dataset '" + id + "' already loaded"};
    datasets[id] = std::move(entry);
  }

  void AddModel(const std::string& id, std::shared_ptr<const Predictor> predictor,
                const std::string& dataset_id) {
    if (id.empty()) Fail(ErrorCode::kValidation, "model id must be non-empty");
    auto entry = std::make_shared<ModelEntry>();
    entry->id = id;
    entry->dataset_id = dataset_id;
    entry->predictor = std::move(predictor);
    entry->dataset = FindDataset(dataset_id);
    if (entry->predictor->classes() != entry->dataset->data.schema.classes()) {
      Fail(ErrorCode::kValidation, "model classes do not match dataset '" + dataset_id + "'");
    }
    if (const auto* m = dynamic_cast<const Model*>(entry->predictor.get());
        m && !(m->schema() == entry->dataset->data.schema)) {
      Fail(ErrorCode::kValidation, "model schema does not match dataset '" + dataset_id + "'");
    }
    std::unique_lock lock(registry_mu);
    if (models.count(id)) throw HttpError{409, "conflict", "model '" + id + "' already loaded"};
    models[id] = std::move(entry);
  }

  std::shared_ptr<const DatasetEntry> FindDataset(const std::string& id) const {
    std::shared_lock lock(registry_mu);
    const auto it = datasets.find(id);
    if (it == datasets.end()) Fail(ErrorCode::kNotFound, "unknown dataset '" + id + "'");
    return it->second;
  }

  std::shared_ptr<const ModelEntry> FindModel(const std::string& id) const {
    std::shared_lock lock(registry_mu);
    const auto it = models.find(id);
    if (it == models.end()) Fail(ErrorCode::kNotFound, "unknown model '" + id + "'");
    return it->second;
  }

  std::shared_ptr<Session> FindSession(const std::string& id) const {
    std::lock_guard lock(sessions_mu);
    const auto it = sessions.find(id);
    if (it == sessions.end()) Fail(ErrorCode::kNotFound, "unknown session '" + id + "'");
    return it->second;
  }

  void LoadDatasetSpec(const json& spec, const std::filesystem::path& base) {
    const std::string id = RequireString(spec, "id");
    FeatureSchema schema;
    if (!spec.contains("schema")) Fail(ErrorCode::kValidation, "'schema' is required");
    if (spec["schema"].is_object()) {
      schema = SchemaFromJson(spec["schema"]);
    } else if (spec["schema"].is_string()) {
      schema = LoadSchema(base / spec["schema"].get<std::string>());
    } else {
      Fail(ErrorCode::kValidation, "'schema' must be an object or a path");
    }
    const std::string csv = RequireString(spec, "csv");
    AddDataset(id, LoadCsv(base / csv, schema));
  }

  void LoadModelSpec(const json& spec, const std::filesystem::path& base) {
    const std::string id = RequireString(spec, "id");
    const std::string dataset_id = RequireString(spec, "dataset");
    const auto dataset = FindDataset(dataset_id);
    std::shared_ptr<const Predictor> predictor;
    if (spec.contains("path") && spec.contains("endpoint")) {
      Fail(ErrorCode::kValidation, "give either 'path' or 'endpoint', not both");
    } else if (spec.contains("path")) {
      predictor = LoadModel(base / RequireString(spec, "path"));
    } else if (spec.contains("endpoint")) {
      predictor = ConnectExternal(RequireString(spec, "endpoint"), dataset->data.schema,
                                  options.external);
    } else {
      Fail(ErrorCode::kValidation, "one of 'path' or 'endpoint' is required");
    }
    AddModel(id, std::move(predictor), dataset_id);
  }

  // Handlers ----------------------------------------------------------------

  GAConfig ConfigFrom(const json& body, std::size_t num_features) const {
    GAConfig cfg = options.ga;
    cfg.seed = OptionalField<std::uint64_t>(body, "seed", cfg.seed);
    cfg.generations = OptionalField<std::size_t>(body, "generations", cfg.generations);
    cfg.population_size = OptionalField<std::size_t>(body, "population", cfg.population_size);
    cfg.Validate(num_features);
    return cfg;
  }

  ServiceResponse CreateSession(const json& body) {
    const auto model = FindModel(RequireString(body, "model"));
    const FeatureSchema& schema = model->dataset->data.schema;
    if (!body.contains("instance")) {
      return ErrorResponse(422, std::string(ErrorCodeName(ErrorCode::kValidation)),
                           "'instance' is required");
    }
    std::vector<std::string> problems;
    const auto x = InstanceFromJson(schema, body["instance"], &problems);
    if (!x) {
      return ErrorResponse(422, std::string(ErrorCodeName(ErrorCode::kValidation)),
                           "invalid instance", problems);
    }
    const std::size_t predicted = model->predictor->Predict(*x);
    auto session = std::make_shared<Session>();
    session->model = model;
    session->x = *x;
    {
      std::lock_guard lock(sessions_mu);
      session->id = "s" + std::to_string(next_session++);
      sessions[session->id] = session;
    }
    return {201,
            {{"id", session->id},
             {"model", model->id},
             {"instance", InstanceToJson(schema, *x)},
             {"prediction", schema.classes().at(predicted)},
             {"constraints", ConstraintsToJson(schema, session->constraints)},
             {"schema", SchemaToJson(schema)}}};
  }

  ServiceResponse PatchConstraints(const std::string& id, const json& body) {
    const auto session = FindSession(id);
    std::lock_guard lock(session->mu);
    const FeatureSchema& schema = session->model->dataset->data.schema;
    if (!body.is_object()) Fail(ErrorCode::kValidation, "constraint patch must be an object");
    Constraints next = ApplyConstraintPatch(schema, session->constraints, body);
    if (AllFeaturesMuted(schema, next)) {
      Fail(ErrorCode::kValidation, "patch would mute every feature; no counterfactual can exist");
    }
    session->constraints = std::move(next);
    return {200, {{"constraints", ConstraintsToJson(schema, session->constraints)}}};
  }

  ServiceResponse RequestCounterfactuals(const std::string& id, const json& body) {
    const auto session = FindSession(id);
    std::lock_guard lock(session->mu);
    const ModelEntry& model = *session->model;
    const FeatureSchema& schema = model.dataset->data.schema;
    Constraints c = session->constraints;
    c.k = OptionalField<std::size_t>(body, "k", 1);
    if (c.k == 0) Fail(ErrorCode::kValidation, "k must be >= 1");
    c.target = ClassField(schema, body, "target");
    GAConfig cfg = ConfigFrom(body, schema.size());
    cfg.time_budget = options.time_budget;
    const GeneticEngine engine(schema, *model.predictor, model.dataset->distance, cfg);
    const json result = CounterfactualResultToJson(schema, engine.Generate(session->x, c));
    session->history.push_back({{"timestamp", UtcTimestamp()},
                                {"request", body},
                                {"constraints", ConstraintsToJson(schema, c)},
                                {"result", result}});
    return {200, result};
  }

  ServiceResponse SubmitAudit(const std::string& kind, const json& body) {
    const auto model = FindModel(RequireString(body, "model"));
    std::shared_ptr<const DatasetEntry> dataset = model->dataset;
    if (body.contains("dataset")) {
      dataset = FindDataset(RequireString(body, "dataset"));
      if (!(dataset->data.schema == model->dataset->data.schema)) {
        Fail(ErrorCode::kValidation, "dataset schema does not match the model's");
      }
    }
    const FeatureSchema& schema = dataset->data.schema;
    AuditOptions opts;
    opts.ga = ConfigFrom(body, schema.size());
    auto predictor = model->predictor;

    std::function<json()> task;
    if (kind == "robustness") {
      RobustnessSampling sampling;
      sampling.per_class = OptionalField<std::size_t>(body, "per_class", sampling.per_class);
      sampling.classes = OptionalField<std::size_t>(body, "classes", 0);
      sampling.only_correct = OptionalField<bool>(body, "only_correct", true);
      sampling.target = ClassField(schema, body, "target");
      sampling.seed = opts.ga.seed;
      sampling.candidate_rows = OptionalField<std::vector<std::size_t>>(body, "rows", {});
      if (sampling.per_class == 0) Fail(ErrorCode::kValidation, "per_class must be >= 1");
      for (std::size_t r : sampling.candidate_rows) {
        if (r >= dataset->data.size()) Fail(ErrorCode::kValidation, "row out of range");
      }
      task = [=] {
        return RobustnessReportToJson(
            AuditRobustness(*predictor, dataset->data, dataset->distance, sampling, opts));
      };
    } else if (kind == "burden") {
      BurdenOptions burden;
      burden.group_by = NameList(body, "group_by");
      if (burden.group_by.empty()) Fail(ErrorCode::kValidation, "'group_by' is required");
      for (const std::string& g : burden.group_by) {
        if (!schema.FeatureIndex(g)) Fail(ErrorCode::kValidation, "unknown grouping feature '" + g + "'");
      }
      const std::string filter = OptionalField<std::string>(body, "filter", "unfavorable");
      if (filter == "all") {
        burden.filter = OutcomeFilter::kAll;
      } else if (filter == "unfavorable") {
        if (!schema.favorable_class()) {
          Fail(ErrorCode::kValidation, "schema has no favorable class; use filter 'all' or a class");
        }
      } else {
        const auto cls = schema.ClassIndex(filter);
        if (!cls) Fail(ErrorCode::kValidation, "unknown filter '" + filter + "'");
        burden.filter = OutcomeFilter::kPredictedClass;
        burden.outcome_class = *cls;
      }
      task = [=] {
        return BurdenReportToJson(
            AuditBurden(*predictor, dataset->data, dataset->distance, burden, opts));
      };
    } else if (kind == "importance") {
      const auto rows = OptionalField<std::vector<std::size_t>>(body, "rows", {});
      for (std::size_t r : rows) {
        if (r >= dataset->data.size()) Fail(ErrorCode::kValidation, "row out of range");
      }
      task = [=] {
        return ImportanceReportToJson(
            AuditFeatureImportance(*predictor, dataset->data, dataset->distance, opts, rows));
      };
    } else if (kind == "individual_fairness") {
      const auto protected_features = NameList(body, "protected");
      for (const std::string& p : protected_features) {
        if (!schema.FeatureIndex(p)) Fail(ErrorCode::kValidation, "unknown protected feature '" + p + "'");
      }
      Instance x;
      std::string instance_id = OptionalField<std::string>(body, "id", "");
      if (body.contains("row")) {
        const auto row = OptionalField<std::size_t>(body, "row", 0);
        if (row >= dataset->data.size()) Fail(ErrorCode::kValidation, "row out of range");
        x = dataset->data.rows[row];
        if (instance_id.empty()) instance_id = std::to_string(row);
      } else if (body.contains("instance")) {
        std::vector<std::string> problems;
        const auto parsed = InstanceFromJson(schema, body["instance"], &problems);
        if (!parsed) {
          throw HttpError{422, std::string(ErrorCodeName(ErrorCode::kValidation)),
                          "invalid instance", problems};
        }
        x = *parsed;
      } else {
        Fail(ErrorCode::kValidation, "one of 'row' or 'instance' is required");
      }
      task = [=] {
        return IndividualFairnessToJson(AuditIndividualFairness(
            *predictor, schema, dataset->distance, x, protected_features, opts, instance_id));
      };
    } else {
      Fail(ErrorCode::kNotFound, "unknown audit kind '" + kind + "'");
    }
    const std::string job = Enqueue(kind, std::move(task));
    return {202, {{"job", job}, {"status", "queued"}}};
  }

  ServiceResponse GetJob(const std::string& id) {
    std::shared_ptr<JobRecord> job;
    {
      std::lock_guard lock(jobs_mu);
      const auto it = jobs.find(id);
      if (it == jobs.end()) Fail(ErrorCode::kNotFound, "unknown job '" + id + "'");
      job = it->second;
    }
    return {200, *job->Read()};
  }

  ServiceResponse Route(std::string_view method, const std::vector<std::string>& p,
                        const json& body) {
    const std::size_t n = p.size();
    if (method == "GET" && n == 1 && p[0] == "healthz") return {200, {{"status", "ok"}}};
    if (method == "POST" && n == 1 && p[0] == "datasets") {
      LoadDatasetSpec(body, ".");
      return {201, {{"id", body["id"]}}};
    }
    if (method == "POST" && n == 1 && p[0] == "models") {
      LoadModelSpec(body, ".");
      return {201, {{"id", body["id"]}}};
    }
    if (method == "POST" && n == 1 && p[0] == "sessions") return CreateSession(body);
    if (method == "PATCH" && n == 3 && p[0] == "sessions" && p[2] == "constraints") {
      return PatchConstraints(p[1], body);
    }
    if (method == "POST" && n == 3 && p[0] == "sessions" && p[2] == "counterfactuals") {
      return RequestCounterfactuals(p[1], body);
    }
    if (method == "POST" && n == 2 && p[0] == "audits") return SubmitAudit(p[1], body);
    if (method == "GET" && n == 2 && p[0] == "jobs") return GetJob(p[1]);
    return ErrorResponse(404, std::string(ErrorCodeName(ErrorCode::kNotFound)),
                         "no route for " + std::string(method) + " /v1/" +
                             [&] {
                               std::string s;
                               for (std::size_t i = 0; i < n; ++i) s += (i ? "/" : "") + p[i];
                               return s;
                             }());
  }

  ServiceResponse Handle(std::string_view method, std::string_view path, std::string_view raw) {
    std::vector<std::string> parts = SplitPath(path);
    if (parts.empty() || parts[0] != "v1") {
      return ErrorResponse(404, std::string(ErrorCodeName(ErrorCode::kNotFound)),
                           "endpoints live under /v1");
    }
    parts.erase(parts.begin());
    json body = json::object();
    if (!raw.empty()) {
      body = json::parse(raw, nullptr, false);
      if (body.is_discarded()) {
        return ErrorResponse(400, std::string(ErrorCodeName(ErrorCode::kParse)),
                             "request body is not valid JSON");
      }
    }
    try {
      return Route(method, parts, body);
    } catch (const HttpError& e) {
      return ErrorResponse(e.status, e.code, e.detail, e.fields);
    } catch (const Error& e) {
      return ErrorResponse(HttpStatusFor(e.code()), std::string(ErrorCodeName(e.code())),
                           e.what());
    } catch (const json::exception& e) {
      return ErrorResponse(422, std::string(ErrorCodeName(ErrorCode::kValidation)), e.what());
    } catch (const std::exception& e) {
      return ErrorResponse(500, std::string(ErrorCodeName(ErrorCode::kInternal)), e.what());
    }
  }

  json Snapshot() const {
    json out = json::array();
    std::vector<std::shared_ptr<Session>> all;
    std::size_t next;
    {
      std::lock_guard lock(sessions_mu);
      for (const auto& [id, s] : sessions) all.push_back(s);
      next = next_session;
    }
    for (const auto& s : all) {
      std::lock_guard lock(s->mu);
      const FeatureSchema& schema = s->model->dataset->data.schema;
      out.push_back({{"id", s->id},
                     {"model", s->model->id},
                     {"instance", InstanceToJson(schema, s->x)},
                     {"constraints", ConstraintsToJson(schema, s->constraints)},
                     {"history", s->history}});
    }
    return {{"next_session", next}, {"sessions", std::move(out)}};
  }

  void Restore(const json& snapshot) {
    for (const json& s : snapshot.at("sessions")) {
      auto session = std::make_shared<Session>();
      session->id = s.at("id").get<std::string>();
      session->model = FindModel(s.at("model").get<std::string>());
      const FeatureSchema& schema = session->model->dataset->data.schema;
      session->x = InstanceFromJson(schema, s.at("instance"));
      session->constraints = ApplyConstraintPatch(schema, Constraints{}, s.at("constraints"));
      session->history = s.value("history", json::array());
      std::lock_guard lock(sessions_mu);
      sessions[session->id] = std::move(session);
    }
    std::lock_guard lock(sessions_mu);
    next_session = std::max(next_session, snapshot.value("next_session", std::size_t{1}));
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { impl_->Shutdown(); }

ServiceResponse Service::Handle(std::string_view method, std::string_view path,
                                std::string_view body) {
  return impl_->Handle(method, path, body);
}

void Service::AddDataset(const std::string& id, Dataset data) {
  try {
    impl_->AddDataset(id, std::move(data));
  } catch (const HttpError& e) {
    Fail(ErrorCode::kValidation, e.detail);
  }
}

void Service::AddModel(const std::string& id, std::shared_ptr<const Predictor> predictor,
                       const std::string& dataset_id) {
  try {
    impl_->AddModel(id, std::move(predictor), dataset_id);
  } catch (const HttpError& e) {
    Fail(ErrorCode::kValidation, e.detail);
  }
}

void Service::Preload(const json& manifest, const std::filesystem::path& base) {
  try {
    for (const json& d : manifest.value("datasets", json::array())) impl_->LoadDatasetSpec(d, base);
    for (const json& m : manifest.value("models", json::array())) impl_->LoadModelSpec(m, base);
  } catch (const HttpError& e) {
    Fail(ErrorCode::kValidation, e.detail);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("preload manifest: ") + e.what());
  }
}

json Service::Snapshot() const { return impl_->Snapshot(); }

void Service::Restore(const json& snapshot) {
  try {
    impl_->Restore(snapshot);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("session snapshot: ") + e.what());
  }
}

void Service::WaitForJobs() {
  std::unique_lock lock(impl_->jobs_mu);
  impl_->idle_cv.wait(lock, [&] {
    return impl_->queue.empty() && impl_->running == 0;
  });
}

void Service::Shutdown() { impl_->Shutdown(); }

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::function<void(const std::string&)> logger;

  explicit Impl(Service& s) : service(s) {
    // httplib's default adds SO_REUSEPORT, which lets a second server share
    // the port silently.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      const ServiceResponse r = service.Handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Patch(".*", handler);
    server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      if (!logger) return;
      logger(json{{"time", UtcTimestamp()},
                  {"method", req.method},
                  {"path", req.path},
                  {"status", res.status},
                  {"remote", req.remote_addr}}
                 .dump());
    });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) Fail(ErrorCode::kTransport, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    Fail(ErrorCode::kTransport, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::Run() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::SetLogger(std::function<void(const std::string&)> logger) {
  impl_->logger = std::move(logger);
}

}  // namespace cfaudit
