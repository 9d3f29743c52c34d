#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "inductor/datasets.hpp"
#include "inductor/harness.hpp"

using namespace inductor;

namespace {

void print_report(const Report& report) {
  std::printf("method=%s model=%s tasks=%zu failed=%d\n", report.method.c_str(),
              report.model.c_str(), report.per_task.size(), report.failed_count);
  std::printf("raw accuracy c     = %.4f\n", report.c);
  std::printf("task accuracy c_t  = %.4f\n", report.c_t);
  std::printf("mean api calls     = %.2f\n", report.mean_api_calls);
  std::printf("mean cost ($)      = %.4f\n", report.mean_cost);
}

void print_cost_table(const std::vector<CostRow>& rows) {
  std::printf("%-10s %6s %14s %12s\n", "dataset", "tasks", "mean_api_calls", "mean_cost");
  for (const auto& r : rows)
    std::printf("%-10s %6d %14.2f %12.4f\n", r.dataset.c_str(), r.tasks, r.mean_api_calls,
                r.mean_cost);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative hypothesis refinement for inductive reasoning tasks"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a method over a task set");
  std::string config_path, method, interpreter, model, cache_dir, tasks_path, output_dir;
  int iters = -1, samples = -1;
  long long seed = -1;
  bool strict = false, noisy_prompt = false, serial = false;
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--method", method, "io|sc|sr|refine");
  run->add_option("--iters", iters, "refinement iterations T");
  run->add_option("--samples", samples, "hypotheses per iteration N");
  run->add_option("--interpreter", interpreter, "symbolic|lm");
  run->add_option("--model", model, "model name");
  run->add_option("--seed", seed, "run seed");
  run->add_option("--cache-dir", cache_dir, "completion cache directory");
  run->add_option("--tasks", tasks_path, "task set JSON (overrides config)");
  run->add_option("--output-dir", output_dir, "artifact directory (overrides config)");
  run->add_flag("--strict", strict, "abort on the first task error");
  run->add_flag("--noisy-prompt", noisy_prompt, "tell the model some examples may be noisy");
  run->add_flag("--serial", serial, "serial reference path (no task-level parallelism)");

  // gen miniscan
  auto* gen = app.add_subcommand("gen", "Generate task sets");
  auto* miniscan = gen->add_subcommand("miniscan", "Generate seeded MiniSCAN-style tasks");
  int count = 100;
  std::string output_mode = "colors", gen_output = "miniscan_tasks.json";
  std::string gen_scripts;
  long long gen_seed = 0;
  miniscan->add_option("--count", count, "number of tasks");
  miniscan->add_option("--output-mode", output_mode, "colors|pseudo");
  miniscan->add_option("--seed", gen_seed, "base seed");
  miniscan->add_option("--output", gen_output, "output task file");
  miniscan->add_option("--scripts", gen_scripts,
                       "also write a scripted-proposer file replaying each truth grammar");

  // perturb noise
  auto* perturb = app.add_subcommand("perturb", "Perturb task sets");
  auto* noise = perturb->add_subcommand("noise", "Replace values in seen outputs");
  double fraction = 0.125;
  long long noise_seed = 0;
  std::string noise_input, noise_output;
  noise->add_option("--fraction", fraction, "fraction of seen exemplars to perturb");
  noise->add_option("--seed", noise_seed, "perturbation seed");
  noise->add_option("--input", noise_input, "input task file")->required();
  noise->add_option("--output", noise_output, "output task file")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "Rebuild a report from persisted traces");
  std::string traces_path, report_dir;
  report_cmd->add_option("--traces", traces_path, "traces JSONL file")->required();
  report_cmd->add_option("--output-dir", report_dir, "also write report.json / report.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      HarnessConfig cfg = load_harness_config(config_path);
      if (!method.empty()) cfg.run.method = method_from_name(method);
      if (iters >= 0) cfg.run.max_iterations = iters;
      if (samples >= 0) cfg.run.samples_per_iteration = samples;
      if (!interpreter.empty()) {
        if (interpreter == "symbolic") cfg.run.interpreter_mode = InterpreterMode::symbolic;
        else if (interpreter == "lm") cfg.run.interpreter_mode = InterpreterMode::lm;
        else throw SchemaError("unknown interpreter mode: " + interpreter);
      }
      if (!model.empty()) cfg.run.model_name = model;
      if (seed >= 0) cfg.run.seed = static_cast<unsigned>(seed);
      if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
      if (!tasks_path.empty()) cfg.tasks_path = tasks_path;
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      if (strict) cfg.strict = true;
      if (noisy_prompt) cfg.run.noisy_prompt = true;
      if (serial) cfg.serial = true;

      HarnessResult result = run_harness(cfg);
      print_report(result.report);
      print_cost_table(cost_report(result.report.per_task));
      std::printf("network calls      = %ld\n", result.network_calls);
      if (!cfg.output_dir.empty())
        std::printf("artifacts in %s (traces.jsonl, report.json, report.csv)\n",
                    cfg.output_dir.c_str());
    } else if (*miniscan) {
      std::vector<Task> tasks;
      nlohmann::ordered_json scripts = nlohmann::ordered_json::object();
      for (int i = 0; i < count; ++i) {
        MiniScanSpec spec;
        spec.seed = static_cast<unsigned>(gen_seed + i);
        spec.output_mode = output_mode == "pseudo" ? MiniScanSpec::OutputMode::pseudowords
                                                   : MiniScanSpec::OutputMode::color_words;
        MiniScanTask t = gen_miniscan(spec);
        scripts[t.task.id] = {t.truth_text};
        tasks.push_back(std::move(t.task));
      }
      save_tasks(gen_output, tasks);
      std::printf("wrote %d tasks to %s\n", count, gen_output.c_str());
      if (!gen_scripts.empty()) {
        std::ofstream out(gen_scripts, std::ios::binary);
        if (!out) throw SchemaError("cannot write scripts file: " + gen_scripts);
        out << scripts.dump(2) << "\n";
        std::printf("wrote truth-grammar scripts to %s\n", gen_scripts.c_str());
      }
    } else if (*noise) {
      std::vector<Task> tasks = load_tasks(noise_input);
      for (size_t i = 0; i < tasks.size(); ++i) {
        NoiseSpec spec;
        spec.fraction = fraction;
        spec.seed = static_cast<unsigned>(noise_seed + static_cast<long long>(i));
        tasks[i] = perturb_noise(tasks[i], spec);
      }
      save_tasks(noise_output, tasks);
      std::printf("wrote %zu perturbed tasks to %s\n", tasks.size(), noise_output.c_str());
    } else if (*report_cmd) {
      std::vector<TraceSummary> summaries = read_traces(traces_path);
      Report report = aggregate(summaries);
      print_report(report);
      print_cost_table(cost_report(report.per_task));
      if (!report_dir.empty()) {
        write_report_json(report_dir + "/report.json", report);
        write_report_csv(report_dir + "/report.csv", report, "mixed");
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
