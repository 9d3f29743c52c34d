#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "inductor/proposer.hpp"
#include "inductor/sandbox.hpp"
#include "inductor/value.hpp"

namespace inductor {

// Executable form of a hypothesis. When compilation failed, ok is false and
// the rule scores 0 on every example.
struct CompiledRule {
  bool ok = false;
  std::string error;  // compile failure reason
  std::function<Outcome(const Value&)> fn;
  std::string translation_source;  // program text, natural-language origin only
};

Outcome apply_rule(const CompiledRule& rule, const Value& input);

class TaskInterpreter {
 public:
  virtual ~TaskInterpreter() = default;
  virtual CompiledRule compile(const Hypothesis& h) = 0;
};

// Greedy completion used for hypothesis translation; receives the fully
// rendered prompt.
using Translator = std::function<std::string(const std::string& prompt)>;

// List Functions / MiniARC interpreter: program-form hypotheses are parsed
// directly; natural-language hypotheses go through one greedy translation
// request whose response is scanned for the first parseable program block.
// Translations are cached by rule text, so re-scoring a hypothesis is free.
class ProgramInterpreter : public TaskInterpreter {
 public:
  ProgramInterpreter(TaskKind kind, Translator translator = nullptr,
                     PromptLibrary library = {}, sandbox::Limits limits = {});
  CompiledRule compile(const Hypothesis& h) override;

  std::string render_translation_prompt(const std::string& rule_text) const;

 private:
  TaskKind kind_;
  Translator translator_;
  PromptLibrary library_;
  sandbox::Limits limits_;
  std::map<std::string, std::string> translation_cache_;
  std::mutex mutex_;
};

// Symbolic interpreter for the task kind. The translator is only consulted
// for listfn/miniarc natural-language hypotheses.
std::unique_ptr<TaskInterpreter> make_symbolic_interpreter(TaskKind kind,
                                                           Translator translator = nullptr,
                                                           PromptLibrary library = {});

}  // namespace inductor
