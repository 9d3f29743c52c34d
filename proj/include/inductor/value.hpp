#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace inductor {

enum class TaskKind { acre, miniscan, listfn, miniarc };
enum class ValueSide { input, output };

const char* kind_name(TaskKind k);
TaskKind kind_from_name(const std::string& name);

// Thrown on malformed serialized values; position is a byte offset into the
// offending text (or npos when not applicable).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& msg, size_t position = std::string::npos)
      : std::runtime_error(position == std::string::npos
                               ? msg
                               : msg + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Label { on, off, undetermined };

const char* label_name(Label l);
std::optional<Label> label_from_text(const std::string& text);

struct TokenSeq {
  std::vector<std::string> tokens;
  bool operator==(const TokenSeq&) const = default;
};

struct IntList {
  std::vector<long long> items;
  bool operator==(const IntList&) const = default;
};

// Rectangular grid, cells 0-9 (ARC palette).
struct IntGrid {
  std::vector<std::vector<int>> rows;
  bool operator==(const IntGrid&) const = default;
  size_t height() const { return rows.size(); }
  size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
};

struct ObjectSet {
  std::vector<std::string> objects;
  bool operator==(const ObjectSet&) const = default;
};

using Value = std::variant<TokenSeq, IntList, IntGrid, Label, ObjectSet>;

// Canonical form used by every equality check in scoring and evaluation.
Value normalize_output(const Value& v);
bool values_equal(const Value& a, const Value& b);

// Single-line (lists, labels, token sequences) or multi-line (grids) text form.
std::string render_value(const Value& v);
bool renders_multiline(const Value& v);

Value parse_value(const std::string& text, TaskKind kind, ValueSide side);

// Lowercase + collapse internal whitespace; shared by ACRE object matching.
std::string normalize_description(const std::string& s);

// Validates grid invariants (rectangular, non-empty, cells 0-9).
void check_grid(const IntGrid& g);

struct Example {
  Value input;
  Value output;
};

struct Task {
  std::string id;
  TaskKind kind = TaskKind::listfn;
  std::vector<Example> seen;
  std::vector<Example> unseen;
  std::vector<Example> ood;
  std::optional<std::string> truth_program;  // sandbox source, listfn only
  bool noisy_flag = false;
};

enum class HypothesisForm { natural_language, program, grammar, blicket_map };

struct Hypothesis {
  std::string raw_text;
  std::string payload;
  HypothesisForm form = HypothesisForm::natural_language;
  int iteration = 1;
  int sample_index = 0;
  bool well_formed = true;
  std::string error;  // set when extraction failed
};

enum class Method { io, sc, sr, refine };
enum class InterpreterMode { symbolic, lm };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct RunConfig {
  Method method = Method::refine;
  int max_iterations = 3;        // T
  int samples_per_iteration = 5; // N
  double temperature_multi = 0.7;
  InterpreterMode interpreter_mode = InterpreterMode::symbolic;
  unsigned seed = 0;
  std::string model_name = "gpt-4-0613";
  bool noisy_prompt = false;
  bool carry_best = true;

  // N = 1 means greedy decoding, otherwise the multi-sample temperature.
  double temperature_for(int n) const { return n > 1 ? temperature_multi : 0.0; }
};

// A failed rule application; failures are data and score 0, they never abort a run.
struct RuleFailure {
  std::string reason;
};

using Outcome = std::variant<Value, RuleFailure>;

inline bool is_failure(const Outcome& o) { return std::holds_alternative<RuleFailure>(o); }

}  // namespace inductor
