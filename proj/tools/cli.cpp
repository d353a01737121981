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

#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cfaudit/adversarial.hpp"
#include "cfaudit/audit.hpp"
#include "cfaudit/constraints.hpp"
#include "cfaudit/dataset.hpp"
#include "cfaudit/distance.hpp"
#include "cfaudit/engine.hpp"
#include "cfaudit/error.hpp"
#include "cfaudit/external_predictor.hpp"
#include "cfaudit/image.hpp"
#include "cfaudit/models.hpp"
#include "cfaudit/report_io.hpp"
#include "cfaudit/service.hpp"

namespace cfaudit::cli {

using nlohmann::json;

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 1 runtime failure, 2 usage or validation error, "
    "3 infeasible search space.\n"
    "CERTIFAI_SEED sets the default for every --seed flag.";

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
    case ErrorCode::kNotFound:
    case ErrorCode::kDimensionMismatch: return kExitUsage;
    case ErrorCode::kInfeasibleSpace: return kExitInfeasible;
    default: return kExitRuntime;
  }
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kNotFound, "cannot open " + path);
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kNotFound, "cannot write " + path);
  out << text;
}

// Flags shared by commands that run the search.
struct SearchFlags {
  std::string model_file;
  std::string endpoint;
  std::string schema_path;
  std::string data_path;
  std::uint64_t seed = 0;
  std::optional<std::size_t> generations;
  std::optional<std::size_t> population;
  std::size_t time_budget_ms = 0;
  std::string format = "table";

  void Attach(CLI::App* cmd, bool needs_data = true) {
    cmd->add_option("--model-file", model_file, "Built-in model file written by 'train'");
    cmd->add_option("--endpoint", endpoint,
                    "External predictor: stdio:<command> or http://host:port[/path]");
    cmd->add_option("--schema", schema_path, "Schema JSON (required with --endpoint)");
    if (needs_data) cmd->add_option("--data", data_path, "Dataset CSV")->required();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--generations", generations, "GA generations (default 300)");
    cmd->add_option("--population", population, "GA population (default n^2 in [100, 30000])");
    cmd->add_option("--time-budget-ms", time_budget_ms, "Wall-clock budget per search, 0 = none")
        ->capture_default_str();
  }

  GAConfig Config() const {
    GAConfig cfg;
    cfg.seed = seed;
    if (generations) cfg.generations = *generations;
    if (population) cfg.population_size = *population;
    cfg.time_budget = std::chrono::milliseconds(time_budget_ms);
    return cfg;
  }
};

struct Loaded {
  FeatureSchema schema;
  std::shared_ptr<const Predictor> predictor;
  json metrics;  // null unless a model file records some
};

Loaded LoadPredictor(const SearchFlags& flags) {
  Loaded out;
  if (!flags.model_file.empty() && !flags.endpoint.empty()) {
    Fail(ErrorCode::kInvalidArgument, "pass either --model-file or --endpoint, not both");
  }
  if (!flags.model_file.empty()) {
    std::unique_ptr<Model> model = LoadModel(flags.model_file);
    out.schema = model->schema();
    out.metrics = LoadModelMetrics(flags.model_file);
    if (!flags.schema_path.empty() && !(LoadSchema(flags.schema_path) == out.schema)) {
      Fail(ErrorCode::kValidation, "--schema does not match the schema stored in the model");
    }
    out.predictor = std::move(model);
  } else if (!flags.endpoint.empty()) {
    if (flags.schema_path.empty()) Fail(ErrorCode::kInvalidArgument, "--endpoint needs --schema");
    out.schema = LoadSchema(flags.schema_path);
    out.predictor = ConnectExternal(flags.endpoint, out.schema);
  } else {
    Fail(ErrorCode::kInvalidArgument, "one of --model-file or --endpoint is required");
  }
  return out;
}

std::optional<std::size_t> ParseClass(const FeatureSchema& schema, const std::string& label) {
  if (label.empty()) return std::nullopt;
  const auto idx = schema.ClassIndex(label);
  if (!idx) Fail(ErrorCode::kValidation, "unknown class '" + label + "'");
  return idx;
}

// train ----------------------------------------------------------------------

struct TrainFlags {
  std::string schema_path;
  std::string data_path;
  std::string model = "mlp";
  std::string hidden = "20,20";
  std::size_t epochs = 200;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::string out_path;
};

int Train(const TrainFlags& f, std::ostream& out) {
  const auto kind = ParseModelKind(f.model);
  if (!kind) {
    Fail(ErrorCode::kInvalidArgument,
         "unsupported model '" + f.model + "' (choose logreg, mlp or dtree)");
  }
  ModelConfig cfg;
  cfg.kind = *kind;
  cfg.hidden.clear();
  for (const std::string& h : SplitList(f.hidden)) {
    std::size_t width = 0;
    try {
      width = std::stoul(h);
    } catch (const std::exception&) {
      Fail(ErrorCode::kInvalidArgument, "--hidden expects comma-separated layer widths");
    }
    cfg.hidden.push_back(width);
  }
  cfg.epochs = f.epochs;
  cfg.learning_rate = f.learning_rate;
  cfg.batch_size = f.batch_size;
  cfg.max_depth = f.max_depth;
  cfg.min_leaf = f.min_leaf;
  cfg.test_fraction = f.test_fraction;
  cfg.seed = f.seed;
  cfg.Validate();

  const FeatureSchema schema = LoadSchema(f.schema_path);
  const Dataset data = LoadCsv(f.data_path, schema);
  const TrainResult result = cfaudit::Train(data, cfg);
  SaveModel(f.out_path, *result.model,
            json{{"test_accuracy", result.test_accuracy},
                 {"test_rows", result.test_indices},
                 {"seed", f.seed}});
  out << "model: " << ModelKindName(cfg.kind);
  if (cfg.kind == ModelKind::kMlp) out << " (hidden " << f.hidden << ")";
  out << "\ntest accuracy: " << FormatFixed(result.test_accuracy) << " (" << result.test_size
      << " held-out rows, " << result.train_size << " training rows)\n"
      << "wrote " << f.out_path << '\n';
  return kExitOk;
}

// explain --------------------------------------------------------------------

struct ExplainFlags {
  SearchFlags search;
  std::string instance_json;
  std::optional<std::size_t> row;
  std::string constraints_path;
  std::size_t k = 1;
  std::string target;
};

int Explain(const ExplainFlags& f, std::ostream& out) {
  const Loaded loaded = LoadPredictor(f.search);
  const Dataset data = LoadCsv(f.search.data_path, loaded.schema);
  const FeatureSchema& schema = loaded.schema;

  Instance x;
  if (!f.instance_json.empty() && f.row) {
    Fail(ErrorCode::kInvalidArgument, "pass either --instance or --row, not both");
  } else if (!f.instance_json.empty()) {
    const json doc = json::parse(f.instance_json, nullptr, false);
    if (doc.is_discarded()) Fail(ErrorCode::kParse, "--instance is not valid JSON");
    x = InstanceFromJson(schema, doc);
  } else if (f.row) {
    if (*f.row >= data.size()) Fail(ErrorCode::kInvalidArgument, "--row out of range");
    x = data.rows[*f.row];
  } else {
    Fail(ErrorCode::kInvalidArgument, "one of --instance or --row is required");
  }

  Constraints c;
  if (!f.constraints_path.empty()) {
    c = ApplyConstraintPatch(schema, c, ReadJsonFile(f.constraints_path));
  }
  c.k = f.k;
  c.target = ParseClass(schema, f.target);

  const GeneticEngine engine(schema, *loaded.predictor, MixedDistance(schema, data.stats),
                             f.search.Config());
  const CounterfactualResult result = engine.Generate(x, c);
  if (f.search.format == "json") {
    out << CounterfactualResultToJson(schema, result).dump(2) << '\n';
  } else {
    out << "mode: " << (f.constraints_path.empty() ? "CUC (unconstrained)" : "CWC (constrained)")
        << '\n'
        << CounterfactualTable(schema, result);
  }
  return kExitOk;
}

// audit ----------------------------------------------------------------------

struct AuditFlags {
  SearchFlags search;
  std::size_t threads = 1;
  std::string out_path;
  // robustness
  std::size_t per_class = 50;
  std::size_t classes = 0;
  std::string split = "test";
  bool all_predictions = false;
  std::string target;
  // burden
  std::string group;
  std::string filter = "unfavorable";
  // fairness
  std::optional<std::size_t> instance_row;
  std::string instance_json;
  std::string protected_features;
};

struct AuditContext {
  Loaded loaded;
  Dataset data;
  DistanceFn distance;
  AuditOptions options;
};

AuditContext PrepareAudit(const AuditFlags& f) {
  AuditContext ctx;
  ctx.loaded = LoadPredictor(f.search);
  ctx.data = LoadCsv(f.search.data_path, ctx.loaded.schema);
  ctx.distance = MixedDistance(ctx.data.schema, ctx.data.stats);
  ctx.options.ga = f.search.Config();
  ctx.options.threads = f.threads;
  return ctx;
}

void Emit(const AuditFlags& f, const json& doc, const std::string& text, std::ostream& out) {
  if (!f.out_path.empty()) WriteTextFile(f.out_path, doc.dump(2) + "\n");
  if (f.search.format == "json") {
    out << doc.dump(2) << '\n';
  } else {
    out << text;
  }
}

int AuditRobustnessCmd(const AuditFlags& f, std::ostream& out, std::ostream& err) {
  AuditContext ctx = PrepareAudit(f);
  RobustnessSampling sampling;
  sampling.per_class = f.per_class;
  sampling.classes = f.classes;
  sampling.seed = f.search.seed;
  sampling.only_correct = !f.all_predictions;
  sampling.target = ParseClass(ctx.data.schema, f.target);
  if (f.split == "test") {
    const json& m = ctx.loaded.metrics;
    bool usable = m.is_object() && m.contains("test_rows");
    if (usable) {
      for (std::size_t r : m["test_rows"].get<std::vector<std::size_t>>()) {
        if (r >= ctx.data.size()) usable = false;
      }
    }
    if (usable) {
      sampling.candidate_rows = m["test_rows"].get<std::vector<std::size_t>>();
    } else {
      err << "note: no held-out split recorded for this data; sampling all rows\n";
    }
  } else if (f.split != "all") {
    Fail(ErrorCode::kInvalidArgument, "--split must be 'test' or 'all'");
  }
  const RobustnessReport report =
      AuditRobustness(*ctx.loaded.predictor, ctx.data, ctx.distance, sampling, ctx.options);
  Emit(f, RobustnessReportToJson(report), RobustnessTable(report), out);
  return report.aborted ? kExitRuntime : kExitOk;
}

int AuditBurdenCmd(const AuditFlags& f, std::ostream& out) {
  AuditContext ctx = PrepareAudit(f);
  BurdenOptions burden;
  burden.group_by = SplitList(f.group);
  if (f.filter == "all") {
    burden.filter = OutcomeFilter::kAll;
  } else if (f.filter != "unfavorable") {
    const auto cls = ctx.data.schema.ClassIndex(f.filter);
    if (!cls) Fail(ErrorCode::kValidation, "--filter must be 'unfavorable', 'all' or a class");
    burden.filter = OutcomeFilter::kPredictedClass;
    burden.outcome_class = *cls;
  }
  const BurdenReport report =
      AuditBurden(*ctx.loaded.predictor, ctx.data, ctx.distance, burden, ctx.options);
  const json doc = BurdenReportToJson(report);
  if (!f.out_path.empty()) WriteTextFile(f.out_path, doc.dump(2) + "\n");
  if (f.search.format == "json") {
    out << doc.dump(2) << '\n';
  } else if (f.search.format == "table") {
    out << BurdenTable(report);
  } else {
    out << BurdenCsv(report);
  }
  return report.aborted ? kExitRuntime : kExitOk;
}

int AuditImportanceCmd(const AuditFlags& f, std::ostream& out) {
  AuditContext ctx = PrepareAudit(f);
  const ImportanceReport report =
      AuditFeatureImportance(*ctx.loaded.predictor, ctx.data, ctx.distance, ctx.options);
  Emit(f, ImportanceReportToJson(report), ImportanceTable(report), out);
  return report.aborted ? kExitRuntime : kExitOk;
}

int AuditFairnessCmd(const AuditFlags& f, std::ostream& out) {
  AuditContext ctx = PrepareAudit(f);
  const FeatureSchema& schema = ctx.data.schema;
  Instance x;
  std::string id;
  if (f.instance_row) {
    if (*f.instance_row >= ctx.data.size()) Fail(ErrorCode::kInvalidArgument, "--instance out of range");
    x = ctx.data.rows[*f.instance_row];
    id = std::to_string(*f.instance_row);
  } else if (!f.instance_json.empty()) {
    const json doc = json::parse(f.instance_json, nullptr, false);
    if (doc.is_discarded()) Fail(ErrorCode::kParse, "--instance-json is not valid JSON");
    x = InstanceFromJson(schema, doc);
  } else {
    Fail(ErrorCode::kInvalidArgument, "one of --instance or --instance-json is required");
  }
  const IndividualFairnessResult result =
      AuditIndividualFairness(*ctx.loaded.predictor, schema, ctx.distance, x,
                              SplitList(f.protected_features), ctx.options, id);
  Emit(f, IndividualFairnessToJson(result), FairnessLine(result) + "\n", out);
  return kExitOk;
}

// serve ----------------------------------------------------------------------

struct ServeFlags {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string preload;
  std::string snapshot;
  std::size_t time_budget_ms = 60000;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
};

int Serve(const ServeFlags& f, std::ostream& err) {
  // Block termination signals before any thread starts so only the waiter
  // below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ServiceOptions options;
  options.ga.seed = f.seed;
  options.time_budget = std::chrono::milliseconds(f.time_budget_ms);
  options.audit_workers = f.workers;
  Service service(options);
  if (!f.preload.empty()) {
    const std::filesystem::path manifest(f.preload);
    service.Preload(ReadJsonFile(f.preload), manifest.parent_path());
  }
  if (!f.snapshot.empty() && std::filesystem::exists(f.snapshot)) {
    service.Restore(ReadJsonFile(f.snapshot));
  }

  HttpServer server(service);
  server.SetLogger([&err](const std::string& line) { err << line << std::endl; });
  const int port = server.Bind(f.host, f.port);
  err << "listening on http://" << f.host << ":" << port << std::endl;

  std::atomic<bool> done{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (done) return;
    err << "received signal " << sig << ", draining" << std::endl;
    // Stop() is a no-op until the listener is running; retry until Run exits.
    while (!done) {
      server.Stop();
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  });
  server.Run();
  done = true;
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();

  service.Shutdown();
  if (!f.snapshot.empty()) {
    WriteTextFile(f.snapshot, service.Snapshot().dump(2) + "\n");
    err << "session snapshot written to " << f.snapshot << std::endl;
  }
  return kExitOk;
}

// adversarial ------------------------------------------------------------------

struct AdversarialFlags {
  SearchFlags search;
  std::string image_path;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string classes;
  double radius = 0.25;
  std::size_t window = 0;
  std::string target;
  std::string out_path;
};

int Adversarial(const AdversarialFlags& f, std::ostream& out) {
  Image img;
  if (std::filesystem::path(f.image_path).extension() == ".csv") {
    if (f.width == 0 || f.height == 0) {
      Fail(ErrorCode::kInvalidArgument, "CSV images need --width and --height");
    }
    img = LoadImage(f.image_path, f.width, f.height);
  } else {
    img = LoadPgm(f.image_path);
  }
  std::shared_ptr<const Predictor> predictor;
  if (!f.search.model_file.empty()) {
    std::unique_ptr<Model> model = LoadModel(f.search.model_file);
    if (model->schema().size() != img.pixels.size()) {
      Fail(ErrorCode::kDimensionMismatch, "model expects " + std::to_string(model->schema().size()) +
                                              " pixels, image has " +
                                              std::to_string(img.pixels.size()));
    }
    predictor = std::move(model);
  } else if (!f.search.endpoint.empty()) {
    const std::vector<std::string> labels = SplitList(f.classes);
    if (labels.size() < 2) Fail(ErrorCode::kInvalidArgument, "--endpoint needs --classes a,b[,..]");
    predictor = ConnectExternal(f.search.endpoint, PixelSchema(img.width, img.height, labels));
  } else {
    Fail(ErrorCode::kInvalidArgument, "one of --model-file or --endpoint is required");
  }

  AdversarialOptions options;
  options.radius = f.radius;
  options.window = f.window;
  options.ga = f.search.Config();
  if (!f.target.empty()) {
    const auto& labels = predictor->classes();
    const auto it = std::find(labels.begin(), labels.end(), f.target);
    if (it == labels.end()) Fail(ErrorCode::kValidation, "unknown class '" + f.target + "'");
    options.target = static_cast<std::size_t>(it - labels.begin());
  }
  const AdversarialResult r = GenerateAdversarial(*predictor, img, options);
  const auto& labels = predictor->classes();
  json doc = {{"input_class", labels.at(r.input_class)}, {"warnings", r.warnings}};
  if (r.adversarial) {
    doc["class"] = labels.at(r.predicted_class);
    doc["ssim"] = r.ssim;
    doc["distance"] = r.distance;
    doc["changed_pixels"] = r.changed_pixels;
    if (!f.out_path.empty()) {
      std::ofstream file(f.out_path, std::ios::binary);
      if (!file) Fail(ErrorCode::kNotFound, "cannot write " + f.out_path);
      WritePgm(file, *r.adversarial);
    }
  }
  if (f.search.format == "json") {
    out << doc.dump(2) << '\n';
  } else {
    out << "input class: " << labels.at(r.input_class) << '\n';
    if (r.adversarial) {
      out << "adversarial class: " << labels.at(r.predicted_class) << '\n'
          << "SSIM: " << FormatFixed(r.ssim) << '\n'
          << "distance (1/SSIM): " << FormatFixed(r.distance) << '\n'
          << "changed pixels: " << r.changed_pixels << '\n';
    } else {
      out << "no adversarial example found\n";
    }
    for (const std::string& w : r.warnings) out << "warning: " << w << '\n';
  }
  return kExitOk;
}

std::uint64_t SeedFromEnvironment() {
  const char* env = std::getenv("CERTIFAI_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    Fail(ErrorCode::kInvalidArgument, std::string("CERTIFAI_SEED is not an unsigned integer: ") + env);
  }
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::uint64_t default_seed = 0;
  try {
    default_seed = SeedFromEnvironment();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app("Counterfactual explanations and audits for black-box classifiers", "cfaudit");
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  TrainFlags train;
  train.seed = default_seed;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a built-in model from CSV");
  train_cmd->add_option("--schema", train.schema_path, "Schema JSON")->required();
  train_cmd->add_option("--data", train.data_path, "Training CSV")->required();
  train_cmd->add_option("--model", train.model, "logreg, mlp or dtree")->capture_default_str();
  train_cmd->add_option("--hidden", train.hidden, "MLP hidden layer widths")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs)->capture_default_str();
  train_cmd->add_option("--learning-rate", train.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size)->capture_default_str();
  train_cmd->add_option("--max-depth", train.max_depth, "Decision tree depth limit")
      ->capture_default_str();
  train_cmd->add_option("--min-leaf", train.min_leaf)->capture_default_str();
  train_cmd->add_option("--test-fraction", train.test_fraction)->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--out", train.out_path, "Model file to write")->required();

  ExplainFlags explain;
  explain.search.seed = default_seed;
  CLI::App* explain_cmd = app.add_subcommand("explain", "Generate counterfactual explanations");
  explain.search.Attach(explain_cmd);
  explain_cmd->add_option("--instance", explain.instance_json, "Instance as a JSON array");
  explain_cmd->add_option("--row", explain.row, "Row index into --data");
  explain_cmd->add_option("--constraints", explain.constraints_path,
                          "Constraint file; its presence selects constrained (CWC) mode");
  explain_cmd->add_option("--k", explain.k, "Number of diverse explanations")->capture_default_str();
  explain_cmd->add_option("--target", explain.target, "Required counterfactual class");
  explain_cmd->add_option("--format", explain.search.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  AuditFlags audit;
  audit.search.seed = default_seed;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Robustness, fairness and importance audits");
  audit_cmd->require_subcommand(1);
  auto attach_audit = [&](CLI::App* cmd, std::vector<std::string> formats) {
    audit.search.Attach(cmd);
    cmd->add_option("--threads", audit.threads, "Concurrent generations")->capture_default_str();
    cmd->add_option("--out", audit.out_path, "Also write the JSON report here");
    cmd->add_option("--format", audit.search.format)->check(CLI::IsMember(formats));
  };
  CLI::App* robustness_cmd = audit_cmd->add_subcommand("robustness", "CERScore and NCERScore");
  attach_audit(robustness_cmd, {"table", "json"});
  robustness_cmd->add_option("--per-class", audit.per_class)->capture_default_str();
  robustness_cmd->add_option("--classes", audit.classes, "Classes to sample, 0 = all")
      ->capture_default_str();
  robustness_cmd->add_option("--split", audit.split, "test (held-out rows) or all")
      ->capture_default_str();
  robustness_cmd->add_flag("--all-predictions", audit.all_predictions,
                           "Keep misclassified instances");
  robustness_cmd->add_option("--target", audit.target, "Required counterfactual class");
  CLI::App* burden_cmd = audit_cmd->add_subcommand("burden", "Per-group burden");
  attach_audit(burden_cmd, {"csv", "table", "json"});
  burden_cmd->add_option("--group", audit.group, "Grouping features, comma separated")->required();
  burden_cmd->add_option("--filter", audit.filter, "unfavorable, all or a predicted class")
      ->capture_default_str();
  CLI::App* importance_cmd = audit_cmd->add_subcommand("importance", "Feature change counts");
  attach_audit(importance_cmd, {"table", "json"});
  CLI::App* fairness_cmd =
      audit_cmd->add_subcommand("fairness", "Muted vs unmuted fitness for one instance");
  attach_audit(fairness_cmd, {"table", "json"});
  fairness_cmd->add_option("--instance", audit.instance_row, "Row index into --data");
  fairness_cmd->add_option("--instance-json", audit.instance_json, "Instance as a JSON array");
  fairness_cmd->add_option("--protected", audit.protected_features, "Comma separated")->required();

  ServeFlags serve;
  serve.seed = default_seed;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--preload", serve.preload, "Manifest of datasets and models");
  serve_cmd->add_option("--snapshot", serve.snapshot,
                        "Session snapshot, restored at start and written on shutdown");
  serve_cmd->add_option("--time-budget-ms", serve.time_budget_ms)->capture_default_str();
  serve_cmd->add_option("--workers", serve.workers, "Audit worker threads")->capture_default_str();
  serve_cmd->add_option("--seed", serve.seed, "Default seed for requests")->capture_default_str();

  AdversarialFlags adv;
  adv.search.seed = default_seed;
  CLI::App* adv_cmd = app.add_subcommand("adversarial", "Image-mode counterfactual under SSIM");
  adv.search.Attach(adv_cmd, /*needs_data=*/false);
  adv_cmd->add_option("--image", adv.image_path, "PGM or one-row CSV image")->required();
  adv_cmd->add_option("--width", adv.width, "Image width (CSV input)");
  adv_cmd->add_option("--height", adv.height, "Image height (CSV input)");
  adv_cmd->add_option("--classes", adv.classes, "Class labels for --endpoint");
  adv_cmd->add_option("--radius", adv.radius, "Max per-pixel change")->capture_default_str();
  adv_cmd->add_option("--window", adv.window, "SSIM window, 0 = fit to image")
      ->capture_default_str();
  adv_cmd->add_option("--target", adv.target, "Required adversarial class");
  adv_cmd->add_option("--out", adv.out_path, "Write the adversarial image as PGM");
  adv_cmd->add_option("--format", adv.search.format)->check(CLI::IsMember({"table", "json"}));

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests surface as CallForHelp on the subcommand.
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return Train(train, out);
    if (explain_cmd->parsed()) return Explain(explain, out);
    if (robustness_cmd->parsed()) return AuditRobustnessCmd(audit, out, err);
    if (burden_cmd->parsed()) {
      if (audit.search.format == "table" && burden_cmd->count("--format") == 0) {
        audit.search.format = "csv";
      }
      return AuditBurdenCmd(audit, out);
    }
    if (importance_cmd->parsed()) return AuditImportanceCmd(audit, out);
    if (fairness_cmd->parsed()) return AuditFairnessCmd(audit, out);
    if (serve_cmd->parsed()) return Serve(serve, err);
    if (adv_cmd->parsed()) return Adversarial(adv, out);
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace cfaudit::cli
