#include "inductor/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "inductor/sandbox.hpp"

namespace inductor {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json value_to_json(const Value& v) {
  struct ToJson {
    ordered_json operator()(const TokenSeq& ts) const { return render_value(Value{ts}); }
    ordered_json operator()(const IntList& l) const {
      ordered_json a = ordered_json::array();
      for (long long x : l.items) a.push_back(x);
      return a;
    }
    ordered_json operator()(const IntGrid& g) const {
      ordered_json a = ordered_json::array();
      for (const auto& row : g.rows) a.push_back(row);
      return a;
    }
    ordered_json operator()(Label l) const { return label_name(l); }
    ordered_json operator()(const ObjectSet& os) const { return os.objects; }
  };
  return std::visit(ToJson{}, v);
}

Value value_from_json(const json& j, TaskKind kind, ValueSide side) {
  switch (kind) {
    case TaskKind::listfn: {
      if (!j.is_array()) throw SchemaError("expected a JSON array of integers");
      IntList out;
      for (const auto& x : j) {
        if (!x.is_number_integer()) throw SchemaError("list element is not an integer");
        out.items.push_back(x.get<long long>());
      }
      return out;
    }
    case TaskKind::miniarc: {
      if (!j.is_array()) throw SchemaError("expected a JSON array of rows");
      IntGrid g;
      for (const auto& row : j) {
        if (!row.is_array()) throw SchemaError("grid row is not an array");
        g.rows.emplace_back();
        for (const auto& x : row) {
          if (!x.is_number_integer()) throw SchemaError("grid cell is not an integer");
          g.rows.back().push_back(x.get<int>());
        }
      }
      try {
        check_grid(g);
      } catch (const FormatError& e) {
        throw SchemaError(e.what());
      }
      return g;
    }
    case TaskKind::miniscan: {
      if (!j.is_string()) throw SchemaError("expected a space-separated token string");
      return parse_value(j.get<std::string>(), kind, side);
    }
    case TaskKind::acre: {
      if (side == ValueSide::output) {
        if (!j.is_string()) throw SchemaError("expected a label string");
        auto l = label_from_text(j.get<std::string>());
        if (!l) throw SchemaError("label is not on/off/undetermined: " + j.get<std::string>());
        return *l;
      }
      if (!j.is_array()) throw SchemaError("expected a JSON array of object descriptions");
      ObjectSet os;
      for (const auto& x : j) {
        if (!x.is_string()) throw SchemaError("object description is not a string");
        os.objects.push_back(x.get<std::string>());
      }
      if (os.objects.empty()) throw SchemaError("empty object set");
      return os;
    }
  }
  throw SchemaError("unknown kind");
}

std::vector<Example> examples_from_json(const json& j, TaskKind kind, const std::string& task_id,
                                        const std::string& field) {
  if (!j.is_array()) throw SchemaError("task " + task_id + ": " + field + " is not an array");
  std::vector<Example> out;
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    try {
      if (!e.contains("input") || !e.contains("output"))
        throw SchemaError("example missing input or output");
      out.push_back({value_from_json(e["input"], kind, ValueSide::input),
                     value_from_json(e["output"], kind, ValueSide::output)});
    } catch (const SchemaError& ex) {
      throw SchemaError("task " + task_id + ": " + field + "[" + std::to_string(i) +
                        "]: " + ex.what());
    }
  }
  return out;
}

struct KindCounts {
  size_t seen, unseen;
};

KindCounts expected_counts(TaskKind kind) {
  switch (kind) {
    case TaskKind::acre: return {6, 4};
    case TaskKind::miniscan: return {14, 10};
    case TaskKind::listfn: return {8, 8};
    case TaskKind::miniarc: return {3, 3};
  }
  return {0, 0};
}

const std::set<std::string>& stoplist() {
  static const std::set<std::string> words = {
      "the", "and", "for", "not", "but", "you", "all", "can", "her", "was", "one",
      "our", "out", "day", "get", "has", "him", "his", "how", "man", "new", "now",
      "old", "see", "two", "way", "who", "boy", "did", "its", "let", "put", "say",
      "she", "too", "use", "run", "sun", "cat", "dog", "red", "mat", "hat", "bad",
      "big", "box", "bed", "cup", "pen", "leg", "arm", "dax", "lug", "wif", "zup",
      "car", "bus", "map", "cap", "tap", "top", "ten", "six", "men", "pet", "pot",
      "rat", "bat", "fan", "van", "jam", "ram", "gap", "lap", "nap", "sad", "mad",
      "hot", "cut", "gut", "hut", "jet", "net", "wet", "yet", "dig", "fig", "pig",
      "win", "bin", "fin", "pin", "tin", "sit", "fit", "hit", "kit", "lit", "pit"};
  return words;
}

}  // namespace

std::vector<Task> load_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open task file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("task file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.contains("tasks") || !doc["tasks"].is_array())
    throw SchemaError("task file " + path + " has no \"tasks\" array");

  std::vector<Task> out;
  for (const auto& tj : doc["tasks"]) {
    Task t;
    if (!tj.contains("id") || !tj["id"].is_string())
      throw SchemaError("task entry missing string \"id\"");
    t.id = tj["id"].get<std::string>();
    if (!tj.contains("kind") || !tj["kind"].is_string())
      throw SchemaError("task " + t.id + ": missing string \"kind\"");
    t.kind = kind_from_name(tj["kind"].get<std::string>());
    t.seen = examples_from_json(tj.value("seen", json::array()), t.kind, t.id, "seen");
    t.unseen = examples_from_json(tj.value("unseen", json::array()), t.kind, t.id, "unseen");
    if (tj.contains("ood") && !tj["ood"].is_null())
      t.ood = examples_from_json(tj["ood"], t.kind, t.id, "ood");
    if (tj.contains("truth_program") && tj["truth_program"].is_string())
      t.truth_program = tj["truth_program"].get<std::string>();
    t.noisy_flag = tj.value("noisy_flag", false);

    if (t.seen.empty()) throw SchemaError("task " + t.id + ": seen is empty");
    if (t.unseen.empty()) throw SchemaError("task " + t.id + ": unseen is empty");
    KindCounts want = expected_counts(t.kind);
    if (t.seen.size() != want.seen || t.unseen.size() != want.unseen)
      std::fprintf(stderr,
                   "warning: task %s has %zu seen / %zu unseen examples (expected %zu / %zu "
                   "for %s)\n",
                   t.id.c_str(), t.seen.size(), t.unseen.size(), want.seen, want.unseen,
                   kind_name(t.kind));
    out.push_back(std::move(t));
  }
  return out;
}

void save_tasks(const std::string& path, const std::vector<Task>& tasks) {
  ordered_json doc;
  doc["tasks"] = ordered_json::array();
  for (const auto& t : tasks) {
    ordered_json tj;
    tj["id"] = t.id;
    tj["kind"] = kind_name(t.kind);
    auto dump_examples = [](const std::vector<Example>& examples) {
      ordered_json arr = ordered_json::array();
      for (const auto& e : examples)
        arr.push_back({{"input", value_to_json(e.input)}, {"output", value_to_json(e.output)}});
      return arr;
    };
    tj["seen"] = dump_examples(t.seen);
    tj["unseen"] = dump_examples(t.unseen);
    if (!t.ood.empty()) tj["ood"] = dump_examples(t.ood);
    if (t.truth_program) tj["truth_program"] = *t.truth_program;
    if (t.noisy_flag) tj["noisy_flag"] = true;
    doc["tasks"].push_back(std::move(tj));
  }
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write task file: " + path);
  out << doc.dump(2) << "\n";
}

std::string gen_pseudoword(std::mt19937& rng, std::vector<std::string>& used) {
  static const std::string consonants = "bcdfghjklmnpqrstvwz";
  static const std::string vowels = "aeiou";
  auto pick = [&rng](const std::string& pool) {
    return pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
  };
  for (;;) {
    std::string word;
    int syllables = std::uniform_int_distribution<int>(1, 2)(rng);
    for (int s = 0; s < syllables; ++s) {
      word += pick(consonants);
      word += pick(vowels);
      // A single syllable must be CVC to reach the length-3 minimum.
      if (syllables == 1 || std::uniform_int_distribution<int>(0, 1)(rng))
        word += pick(consonants);
    }
    if (stoplist().count(word)) continue;
    if (std::find(used.begin(), used.end(), word) != used.end()) continue;
    used.push_back(word);
    return word;
  }
}

MiniScanTask gen_miniscan(const MiniScanSpec& spec) {
  std::mt19937 rng(spec.seed);
  std::vector<std::string> used;

  std::vector<std::string> prims;
  for (int i = 0; i < spec.primitive_count; ++i) prims.push_back(gen_pseudoword(rng, used));
  std::vector<std::string> fns;
  for (int i = 0; i < 3; ++i) fns.push_back(gen_pseudoword(rng, used));

  std::vector<std::string> outputs;
  if (spec.output_mode == MiniScanSpec::OutputMode::color_words) {
    std::vector<std::string> colors = {"RED", "BLUE", "GREEN", "YELLOW", "PURPLE", "ORANGE"};
    std::shuffle(colors.begin(), colors.end(), rng);
    outputs.assign(colors.begin(), colors.begin() + spec.primitive_count);
  } else {
    for (int i = 0; i < spec.primitive_count; ++i) outputs.push_back(gen_pseudoword(rng, used));
  }

  Grammar g;
  int index = 0;
  for (int i = 0; i < spec.primitive_count; ++i)
    g.rules.push_back({{{false, prims[static_cast<size_t>(i)]}},
                       {{false, outputs[static_cast<size_t>(i)]}},
                       4,
                       index++});
  GrammarSymbol A{true, "A"}, B{true, "B"};
  g.rules.push_back({{A, {false, fns[0]}}, {A, A, A}, 3, index++});           // triple
  g.rules.push_back({{A, {false, fns[1]}, B}, {A, B, A}, 2, index++});       // wrap
  g.rules.push_back({{A, {false, fns[2]}, B}, {B, A}, 1, index++});          // swap
  validate_grammar(g);

  const std::string &P0 = prims[0], &P1 = prims[1], &P2 = prims[2], &P3 = prims[3];
  const std::string &F0 = fns[0], &F1 = fns[1], &F2 = fns[2];
  std::vector<std::vector<std::string>> seen_cmds = {
      {P0}, {P1}, {P2}, {P3},
      {P0, F0}, {P1, F0},
      {P0, F1, P1}, {P2, F1, P3},
      {P0, F2, P1}, {P3, F2, P2},
      {P1, F0, F2, P2},
      {P2, F1, P0, F0},
      {P0, F1, P1, F2, P2},
      {P3, F0, F0},
  };
  std::vector<std::vector<std::string>> unseen_cmds = {
      {P0, F2, P2},
      {P1, F1, P3},
      {P2, F0},
      {P3, F2, P0, F0},
      {P1, F2, P2, F1, P3},
      {P0, F0, F1, P1},
      {P2, F2, P3, F0},
      {P3, F1, P0, F2, P1},
      {P1, F0, F0},
      {P0, F1, P2, F0},
  };

  MiniScanTask out;
  out.task.id = spec.id.empty() ? "miniscan-" + std::to_string(spec.seed) : spec.id;
  out.task.kind = TaskKind::miniscan;
  auto make_examples = [&g](const std::vector<std::vector<std::string>>& cmds) {
    std::vector<Example> examples;
    for (const auto& cmd : cmds) {
      TokenSeq input{cmd};
      auto output = derive(g, input);
      if (!output)
        throw std::logic_error("miniscan generation: truth grammar cannot derive a command");
      examples.push_back({Value{input}, Value{*output}});
    }
    return examples;
  };
  out.task.seen = make_examples(seen_cmds);
  out.task.unseen = make_examples(unseen_cmds);
  out.truth = std::move(g);
  out.truth_text = render_grammar(out.truth);
  return out;
}

Task perturb_noise(const Task& task, const NoiseSpec& spec) {
  if (task.kind != TaskKind::listfn)
    throw SchemaError("perturb_noise applies to listfn tasks only");
  std::mt19937 rng(spec.seed);
  Task out = task;
  out.noisy_flag = true;

  size_t k = static_cast<size_t>(
      std::lround(spec.fraction * static_cast<double>(task.seen.size())));
  std::vector<size_t> indices(task.seen.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::shuffle(indices.begin(), indices.end(), rng);
  indices.resize(k);
  std::sort(indices.begin(), indices.end());

  std::uniform_int_distribution<int> value_dist(0, 99);
  for (size_t idx : indices) {
    auto& output = std::get<IntList>(out.seen[idx].output);
    if (output.items.empty()) {
      output.items.push_back(value_dist(rng));
      continue;
    }
    size_t n = std::min<size_t>(std::uniform_int_distribution<int>(1, 2)(rng),
                                output.items.size());
    std::vector<size_t> positions(output.items.size());
    for (size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    std::shuffle(positions.begin(), positions.end(), rng);
    for (size_t i = 0; i < n; ++i) {
      long long old = output.items[positions[i]];
      long long fresh;
      do {
        fresh = value_dist(rng);
      } while (fresh == old);
      output.items[positions[i]] = fresh;
    }
  }
  return out;
}

std::vector<Example> ood_sample_lists(const Task& task, int n, int min_len, int max_len,
                                      unsigned seed) {
  if (!task.truth_program)
    throw SchemaError("task " + task.id + " has no truth_program");
  sandbox::Program truth = sandbox::parse_program(*task.truth_program);

  size_t longest_seen = 0;
  for (const auto& ex : task.seen)
    if (const auto* l = std::get_if<IntList>(&ex.input))
      longest_seen = std::max(longest_seen, l->items.size());
  if (max_len <= 0) max_len = static_cast<int>(2 * std::max<size_t>(longest_seen, 4));
  if (min_len <= 0) min_len = std::max(1, static_cast<int>(longest_seen) + 1);
  if (min_len > max_len) min_len = max_len;

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> len_dist(min_len, max_len);
  std::uniform_int_distribution<int> value_dist(0, 99);

  std::vector<Example> out;
  while (static_cast<int>(out.size()) < n) {
    bool produced = false;
    for (int attempt = 0; attempt < 50 && !produced; ++attempt) {
      IntList input;
      int len = len_dist(rng);
      for (int i = 0; i < len; ++i) input.items.push_back(value_dist(rng));
      try {
        Value output = sandbox::eval_program(truth, input);
        out.push_back({Value{std::move(input)}, std::move(output)});
        produced = true;
      } catch (const sandbox::EvalError&) {
        // truth program rejects this input; resample
      }
    }
    if (!produced)
      throw SchemaError("task " + task.id + ": truth program failed on 50 sampled inputs");
  }
  return out;
}

}  // namespace inductor
