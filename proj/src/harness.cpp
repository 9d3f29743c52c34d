#include "inductor/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "inductor/datasets.hpp"

namespace inductor {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// One serialization for every numeric artifact, so CSV, JSON, and JSONL agree
// byte for byte on shared numbers.
std::string num(double x) { return json(x).dump(); }

}  // namespace

double task_accuracy(const std::vector<Outcome>& predictions,
                     const std::vector<Example>& unseen) {
  if (predictions.size() != unseen.size())
    throw SchemaError("task_accuracy: " + std::to_string(predictions.size()) +
                      " predictions for " + std::to_string(unseen.size()) + " examples");
  if (unseen.empty()) return 0.0;
  int correct = 0;
  for (size_t i = 0; i < unseen.size(); ++i) {
    const auto* v = std::get_if<Value>(&predictions[i]);
    if (v && values_equal(*v, unseen[i].output)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(unseen.size());
}

TraceSummary summarize(const RunTrace& trace, TaskKind kind) {
  TraceSummary s;
  s.task_id = trace.task_id;
  s.method = method_name(trace.config.method);
  s.model = trace.config.model_name;
  s.kind = kind_name(kind);
  s.a_tau = trace.a_tau;
  s.iterations_used = static_cast<int>(trace.iterations.size());
  s.api_calls = trace.ledger.api_calls;
  s.tokens = trace.ledger.prompt_tokens + trace.ledger.completion_tokens;
  s.cost = trace.ledger.estimated_cost;
  s.failed = trace.failed;
  s.error = trace.error;
  return s;
}

Report aggregate(std::vector<TraceSummary> summaries) {
  if (summaries.empty()) throw SchemaError("aggregate: no traces");
  for (const auto& s : summaries) {
    if (s.method != summaries.front().method || s.model != summaries.front().model)
      throw SchemaError("aggregate: mixed method/model in traces (" + s.task_id + ")");
  }
  std::sort(summaries.begin(), summaries.end(),
            [](const TraceSummary& a, const TraceSummary& b) { return a.task_id < b.task_id; });

  Report r;
  r.method = summaries.front().method;
  r.model = summaries.front().model;
  int counted = 0;
  int perfect = 0;
  double sum_a = 0.0, sum_calls = 0.0, sum_cost = 0.0;
  for (const auto& s : summaries) {
    if (s.failed) {
      ++r.failed_count;
      continue;
    }
    ++counted;
    sum_a += s.a_tau;
    if (s.a_tau == 1.0) ++perfect;
    sum_calls += static_cast<double>(s.api_calls);
    sum_cost += s.cost;
  }
  if (counted > 0) {
    r.c = sum_a / counted;
    r.c_t = static_cast<double>(perfect) / counted;
    r.mean_api_calls = sum_calls / counted;
    r.mean_cost = sum_cost / counted;
  }
  r.per_task = std::move(summaries);
  return r;
}

std::vector<CostRow> cost_report(const std::vector<TraceSummary>& summaries) {
  std::map<std::string, CostRow> rows;
  for (const auto& s : summaries) {
    if (s.failed) continue;
    auto& row = rows[s.kind];
    row.dataset = s.kind;
    row.tasks += 1;
    row.mean_api_calls += static_cast<double>(s.api_calls);
    row.mean_cost += s.cost;
  }
  std::vector<CostRow> out;
  for (auto& [_, row] : rows) {
    if (row.tasks > 0) {
      row.mean_api_calls /= row.tasks;
      row.mean_cost /= row.tasks;
    }
    out.push_back(row);
  }
  return out;
}

ordered_json trace_to_json(const RunTrace& trace, TaskKind kind) {
  ordered_json j;
  j["task_id"] = trace.task_id;
  j["method"] = method_name(trace.config.method);
  j["T"] = trace.config.max_iterations;
  j["N"] = trace.config.samples_per_iteration;
  j["iterations"] = ordered_json::array();
  for (const auto& it : trace.iterations) {
    ordered_json ij;
    ij["t"] = it.t;
    ij["candidates"] = ordered_json::array();
    for (const auto& c : it.candidates) {
      const std::string& text =
          c.hypothesis.payload.empty() ? c.hypothesis.raw_text : c.hypothesis.payload;
      ij["candidates"].push_back({{"text", text}, {"score", c.score}});
    }
    ij["selected"] = it.selected;
    ij["feedback"] = it.feedback;
    j["iterations"].push_back(std::move(ij));
  }
  j["final_rule"] = trace.final_hypothesis.payload;
  j["a_tau"] = trace.a_tau;
  j["api_calls"] = trace.ledger.api_calls;
  j["tokens"] = trace.ledger.prompt_tokens + trace.ledger.completion_tokens;
  // Cost-accounting extras beyond the schema above; readers may ignore them.
  j["model"] = trace.config.model_name;
  j["kind"] = kind_name(kind);
  j["cost"] = trace.ledger.estimated_cost;
  if (trace.failed) j["error"] = trace.error;
  return j;
}

void write_traces(const std::string& path, const std::vector<RunTrace>& traces,
                  const std::map<std::string, TaskKind>& kinds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write traces file: " + path);
  for (const auto& t : traces) {
    auto it = kinds.find(t.task_id);
    TaskKind kind = it == kinds.end() ? TaskKind::listfn : it->second;
    out << trace_to_json(t, kind).dump() << "\n";
  }
}

std::vector<TraceSummary> read_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open traces file: " + path);
  std::vector<TraceSummary> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(path + ":" + std::to_string(lineno) + ": bad trace line: " + e.what());
    }
    TraceSummary s;
    s.task_id = j.at("task_id").get<std::string>();
    s.method = j.at("method").get<std::string>();
    s.model = j.value("model", std::string{});
    s.kind = j.value("kind", std::string{"listfn"});
    s.a_tau = j.at("a_tau").get<double>();
    s.iterations_used = static_cast<int>(j.at("iterations").size());
    s.api_calls = j.at("api_calls").get<long>();
    s.tokens = j.at("tokens").get<long>();
    s.cost = j.value("cost", 0.0);
    if (j.contains("error")) {
      s.failed = true;
      s.error = j["error"].get<std::string>();
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_report_json(const std::string& path, const Report& report) {
  ordered_json j;
  j["method"] = report.method;
  j["model"] = report.model;
  j["c"] = report.c;
  j["c_t"] = report.c_t;
  j["mean_api_calls"] = report.mean_api_calls;
  j["mean_cost"] = report.mean_cost;
  j["failed_tasks"] = report.failed_count;
  j["per_task"] = ordered_json::array();
  for (const auto& s : report.per_task) {
    ordered_json tj = {{"task_id", s.task_id}, {"a_tau", s.a_tau},
                       {"iterations_used", s.iterations_used}, {"api_calls", s.api_calls},
                       {"tokens", s.tokens}, {"cost", s.cost}};
    if (s.failed) tj["error"] = s.error;
    j["per_task"].push_back(std::move(tj));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write report file: " + path);
  out << j.dump(2) << "\n";
}

void write_report_csv(const std::string& path, const Report& report,
                      const std::string& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write csv file: " + path);
  out << "method,dataset,c,c_t,mean_api_calls\n";
  out << report.method << "," << dataset << "," << num(report.c) << "," << num(report.c_t)
      << "," << num(report.mean_api_calls) << "\n";
}

HarnessConfig load_harness_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("config file " + path + " is not valid JSON: " + e.what());
  }
  HarnessConfig cfg;
  cfg.tasks_path = j.value("tasks", std::string{});
  cfg.cache_dir = j.value("cache_dir", std::string{});
  cfg.output_dir = j.value("output_dir", std::string{});
  cfg.scripts_path = j.value("scripts", std::string{});
  cfg.prompt_dir = j.value("prompts", std::string{});
  cfg.dataset_name = j.value("dataset", std::string{"mixed"});
  cfg.strict = j.value("strict", false);
  cfg.serial = j.value("serial", false);
  if (j.contains("method")) cfg.run.method = method_from_name(j["method"].get<std::string>());
  cfg.run.max_iterations = j.value("iters", cfg.run.max_iterations);
  cfg.run.samples_per_iteration = j.value("samples", cfg.run.samples_per_iteration);
  cfg.run.temperature_multi = j.value("temperature", cfg.run.temperature_multi);
  if (j.contains("interpreter")) {
    std::string mode = j["interpreter"].get<std::string>();
    if (mode == "symbolic") cfg.run.interpreter_mode = InterpreterMode::symbolic;
    else if (mode == "lm") cfg.run.interpreter_mode = InterpreterMode::lm;
    else throw SchemaError("config: unknown interpreter mode " + mode);
  }
  cfg.run.model_name = j.value("model", cfg.run.model_name);
  cfg.run.seed = j.value("seed", cfg.run.seed);
  cfg.run.noisy_prompt = j.value("noisy_prompt", false);
  cfg.run.carry_best = j.value("carry_best", true);
  if (j.contains("rates")) {
    for (auto& [model, rj] : j["rates"].items()) {
      ModelRates r;
      r.prompt_per_1k = rj.value("prompt_per_1k", r.prompt_per_1k);
      r.completion_per_1k = rj.value("completion_per_1k", r.completion_per_1k);
      cfg.rates_by_model[model] = r;
    }
  }
  return cfg;
}

namespace {

// task_id -> scripted responses ("default" applies to tasks without an entry).
std::map<std::string, std::vector<std::string>> load_scripts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scripts file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("scripts file " + path + " is not valid JSON: " + e.what());
  }
  std::map<std::string, std::vector<std::string>> out;
  for (auto& [key, arr] : j.items()) {
    if (!arr.is_array()) throw SchemaError("scripts entry " + key + " is not an array");
    auto& list = out[key];
    for (const auto& r : arr) list.push_back(r.get<std::string>());
  }
  return out;
}

}  // namespace

HarnessResult run_harness(const HarnessConfig& cfg, const std::vector<Task>& tasks) {
  if (tasks.empty()) throw SchemaError("run_harness: no tasks");

  std::map<std::string, std::vector<std::string>> scripts;
  std::unique_ptr<HttpBackend> http;
  if (!cfg.scripts_path.empty()) {
    scripts = load_scripts(cfg.scripts_path);
  } else {
    http = HttpBackend::from_env();
    if (!http && cfg.cache_dir.empty())
      throw TransportError("no scripted responses, no API key, and no cache directory");
  }

  ModelRates rates;
  if (auto it = cfg.rates_by_model.find(cfg.run.model_name); it != cfg.rates_by_model.end())
    rates = it->second;

  PromptLibrary library =
      cfg.prompt_dir.empty() ? PromptLibrary{} : PromptLibrary{cfg.prompt_dir};

  std::vector<RunTrace> traces(tasks.size());
  std::vector<long> network_calls(tasks.size(), 0);
  int n = static_cast<int>(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!cfg.serial)
#endif
  for (int i = 0; i < n; ++i) {
    const Task& task = tasks[static_cast<size_t>(i)];
    RunTrace trace;
    try {
      std::unique_ptr<ScriptedBackend> scripted;
      CompletionBackend* backend = http.get();
      if (!cfg.scripts_path.empty()) {
        auto it = scripts.find(task.id);
        if (it == scripts.end()) it = scripts.find("default");
        if (it == scripts.end())
          throw TransportError("no scripted responses for task " + task.id);
        scripted = std::make_unique<ScriptedBackend>(it->second);
        backend = scripted.get();
      }
      CachingClient client(backend, cfg.cache_dir, rates);
      Engine engine(library, client, cfg.run, cfg.serial);
      trace = engine.run_task(task);
      network_calls[static_cast<size_t>(i)] = client.network_calls();
    } catch (const std::exception& e) {
      trace.task_id = task.id;
      trace.config = cfg.run;
      trace.failed = true;
      trace.error = e.what();
    }
    traces[static_cast<size_t>(i)] = std::move(trace);
  }

  std::sort(traces.begin(), traces.end(),
            [](const RunTrace& a, const RunTrace& b) { return a.task_id < b.task_id; });

  if (cfg.strict) {
    for (const auto& t : traces)
      if (t.failed) throw SchemaError("task " + t.task_id + " failed: " + t.error);
  }

  std::map<std::string, TaskKind> kinds;
  for (const auto& t : tasks) kinds[t.id] = t.kind;

  HarnessResult result;
  for (long c : network_calls) result.network_calls += c;
  std::vector<TraceSummary> summaries;
  for (const auto& t : traces) summaries.push_back(summarize(t, kinds[t.task_id]));
  result.report = aggregate(std::move(summaries));
  result.traces = std::move(traces);

  if (!cfg.output_dir.empty()) {
    write_traces(cfg.output_dir + "/traces.jsonl", result.traces, kinds);
    write_report_json(cfg.output_dir + "/report.json", result.report);
    write_report_csv(cfg.output_dir + "/report.csv", result.report, cfg.dataset_name);
  }
  return result;
}

HarnessResult run_harness(const HarnessConfig& cfg) {
  return run_harness(cfg, load_tasks(cfg.tasks_path));
}

}  // namespace inductor
