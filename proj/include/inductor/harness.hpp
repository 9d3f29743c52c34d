#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "inductor/engine.hpp"

namespace inductor {

// The per-trace numbers a Report is built from. Persisted traces round-trip
// through this struct, so a report regenerated from the JSONL is bit-identical
// to the live one.
struct TraceSummary {
  std::string task_id;
  std::string method;
  std::string model;
  std::string kind;
  double a_tau = 0.0;
  int iterations_used = 0;
  long api_calls = 0;
  long tokens = 0;
  double cost = 0.0;
  bool failed = false;
  std::string error;
};

struct Report {
  std::string method;
  std::string model;
  std::vector<TraceSummary> per_task;  // ordered by task_id, failed included
  double c = 0.0;                      // mean a_tau over non-failed tasks
  double c_t = 0.0;                    // fraction of non-failed tasks with a_tau = 1
  double mean_api_calls = 0.0;
  double mean_cost = 0.0;
  int failed_count = 0;
};

struct CostRow {
  std::string dataset;
  int tasks = 0;
  double mean_api_calls = 0.0;
  double mean_cost = 0.0;
};

// Fraction of normalized-equal prediction/truth pairs; failures count 0.
double task_accuracy(const std::vector<Outcome>& predictions, const std::vector<Example>& unseen);

TraceSummary summarize(const RunTrace& trace, TaskKind kind);

// Throws SchemaError on an empty list or mixed method/model.
Report aggregate(std::vector<TraceSummary> summaries);

// Per-dataset mean API calls and cost (failed tasks excluded).
std::vector<CostRow> cost_report(const std::vector<TraceSummary>& summaries);

nlohmann::ordered_json trace_to_json(const RunTrace& trace, TaskKind kind);
void write_traces(const std::string& path, const std::vector<RunTrace>& traces,
                  const std::map<std::string, TaskKind>& kinds);
std::vector<TraceSummary> read_traces(const std::string& path);

void write_report_json(const std::string& path, const Report& report);
void write_report_csv(const std::string& path, const Report& report, const std::string& dataset);

struct HarnessConfig {
  std::string tasks_path;
  RunConfig run;
  std::string cache_dir;
  std::string output_dir;    // empty = write no artifacts
  std::string scripts_path;  // JSON {"<task_id>"|"default": [responses...]}; empty = live backend
  std::string prompt_dir;    // template overrides
  std::string dataset_name = "mixed";
  bool strict = false;
  bool serial = false;  // serial reference path; otherwise tasks fan out across threads
  std::map<std::string, ModelRates> rates_by_model;
};

// Reads a JSON config file into a HarnessConfig (CLI flags override afterwards).
HarnessConfig load_harness_config(const std::string& path);

struct HarnessResult {
  Report report;
  std::vector<RunTrace> traces;  // ordered by task_id
  long network_calls = 0;
};

// Runs the configured method over every task, writes traces JSONL + report
// JSON + CSV into output_dir, and returns the report. With strict unset,
// per-task errors become failed traces excluded from the means; with it set,
// the first error aborts.
HarnessResult run_harness(const HarnessConfig& cfg, const std::vector<Task>& tasks);
HarnessResult run_harness(const HarnessConfig& cfg);  // loads cfg.tasks_path

}  // namespace inductor
