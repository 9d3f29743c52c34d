#pragma once

#include <random>
#include <string>
#include <vector>

#include "inductor/qcfg.hpp"
#include "inductor/value.hpp"

namespace inductor {

struct MiniScanSpec {
  int primitive_count = 4;
  enum class OutputMode { color_words, pseudowords };
  OutputMode output_mode = OutputMode::color_words;
  unsigned seed = 0;
  std::string id;  // task id; defaults to "miniscan-<seed>"
};

struct NoiseSpec {
  double fraction = 0.125;  // of seen exemplars
  unsigned seed = 0;
};

struct MiniScanTask {
  Task task;
  Grammar truth;
  std::string truth_text;  // render_grammar(truth), replayable as a scripted response
};

// Task-set JSON I/O (schema: {"tasks":[{id, kind, seen, unseen, ood,
// truth_program, noisy_flag}]}). Count deviations from the per-kind defaults
// warn on stderr; schema violations throw SchemaError naming task and field.
std::vector<Task> load_tasks(const std::string& path);
void save_tasks(const std::string& path, const std::vector<Task>& tasks);

// CV/CVC syllables, 1-2 of them, lowercase, length 3-8, never a stoplisted
// English word, unique within the used set.
std::string gen_pseudoword(std::mt19937& rng, std::vector<std::string>& used);

// Seeded generation: 4 primitives + triple/wrap/swap function rules, 14 seen
// and 10 unseen commands covering every primitive and function rule, outputs
// recorded by deriving with the truth grammar.
MiniScanTask gen_miniscan(const MiniScanSpec& spec);

// Perturbs exactly round(fraction * |seen|) seen outputs in 1-2 positions
// each with fresh values in 0-99; unseen untouched; sets noisy_flag.
Task perturb_noise(const Task& task, const NoiseSpec& spec);

// Samples n longer inputs (lengths in [min_len, max_len], default twice the
// longest seen input) and computes outputs with the task's truth program.
std::vector<Example> ood_sample_lists(const Task& task, int n, int min_len = 0, int max_len = 0,
                                      unsigned seed = 0);

}  // namespace inductor
