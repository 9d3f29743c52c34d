// Compares the serial reference path against the OpenMP fan-out on a batch of
// generated tasks with a scripted proposer, and checks the reports agree.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "inductor/datasets.hpp"
#include "inductor/harness.hpp"

using namespace inductor;
using clock_type = std::chrono::steady_clock;

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel harness benchmark"};
  int count = 200;
  unsigned seed = 7;
  app.add_option("--count", count, "number of generated tasks");
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  std::vector<Task> tasks;
  nlohmann::ordered_json scripts = nlohmann::ordered_json::object();
  for (int i = 0; i < count; ++i) {
    MiniScanSpec spec;
    spec.seed = seed + static_cast<unsigned>(i);
    MiniScanTask t = gen_miniscan(spec);
    scripts[t.task.id] = {t.truth_text};
    tasks.push_back(std::move(t.task));
  }
  std::string scripts_path = "bench_scripts.json";
  {
    std::ofstream out(scripts_path, std::ios::binary);
    out << scripts.dump() << "\n";
  }

  HarnessConfig cfg;
  cfg.scripts_path = scripts_path;
  cfg.run.method = Method::refine;
  cfg.run.max_iterations = 1;
  cfg.run.samples_per_iteration = 1;

  auto timed = [&](bool serial) {
    cfg.serial = serial;
    auto t0 = clock_type::now();
    HarnessResult r = run_harness(cfg, tasks);
    auto t1 = clock_type::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::printf("%-8s %8.1f ms   c=%.3f c_t=%.3f\n", serial ? "serial" : "parallel", ms,
                r.report.c, r.report.c_t);
    return r;
  };

  HarnessResult serial = timed(true);
  HarnessResult parallel = timed(false);
  if (serial.report.c != parallel.report.c || serial.report.c_t != parallel.report.c_t) {
    std::fprintf(stderr, "mismatch between serial and parallel reports\n");
    return 1;
  }
  std::printf("reports agree\n");
  std::remove(scripts_path.c_str());
  return 0;
}
