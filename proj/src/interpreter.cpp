#include "inductor/interpreter.hpp"

#include <vector>

#include "inductor/blicket.hpp"
#include "inductor/qcfg.hpp"

namespace inductor {

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

CompiledRule compile_failure(const std::string& why) {
  CompiledRule r;
  r.ok = false;
  r.error = why;
  return r;
}

class BlicketInterpreter : public TaskInterpreter {
 public:
  CompiledRule compile(const Hypothesis& h) override {
    if (!h.well_formed) return compile_failure("ill-formed hypothesis: " + h.error);
    BlicketRule rule;
    try {
      rule = parse_blicket_rule(h.payload);
    } catch (const BlicketError& e) {
      return compile_failure(e.what());
    }
    CompiledRule out;
    out.ok = true;
    out.fn = [rule = std::move(rule)](const Value& input) -> Outcome {
      const auto* objects = std::get_if<ObjectSet>(&input);
      if (!objects) return RuleFailure{"input is not an object set"};
      return Value{apply_blicket(rule, *objects)};
    };
    return out;
  }
};

class QcfgInterpreter : public TaskInterpreter {
 public:
  CompiledRule compile(const Hypothesis& h) override {
    if (!h.well_formed) return compile_failure("ill-formed hypothesis: " + h.error);
    Grammar grammar;
    try {
      grammar = parse_grammar(h.payload);
    } catch (const GrammarError& e) {
      return compile_failure(e.what());
    }
    CompiledRule out;
    out.ok = true;
    out.fn = [grammar = std::move(grammar)](const Value& input) -> Outcome {
      const auto* seq = std::get_if<TokenSeq>(&input);
      if (!seq) return RuleFailure{"input is not a token sequence"};
      auto derived = derive(grammar, *seq);
      if (!derived) return RuleFailure{"no derivation"};
      return Value{std::move(*derived)};
    };
    return out;
  }
};

// First parseable program block: fenced blocks first, then the whole text,
// then the text after a "Program:" marker.
std::optional<sandbox::Program> scan_for_program(const std::string& text) {
  std::vector<std::string> candidates;
  size_t pos = 0;
  while (true) {
    size_t fence = text.find("```", pos);
    if (fence == std::string::npos) break;
    size_t body_start = text.find('\n', fence);
    if (body_start == std::string::npos) break;
    size_t fence_end = text.find("```", body_start);
    if (fence_end == std::string::npos) break;
    candidates.push_back(trim_copy(text.substr(body_start + 1, fence_end - body_start - 1)));
    pos = fence_end + 3;
  }
  candidates.push_back(trim_copy(text));
  size_t marker = text.find("Program:");
  if (marker != std::string::npos) candidates.push_back(trim_copy(text.substr(marker + 8)));
  for (const auto& c : candidates) {
    if (c.empty()) continue;
    try {
      return sandbox::parse_program(c);
    } catch (const sandbox::ParseError&) {
    }
  }
  return std::nullopt;
}

}  // namespace

Outcome apply_rule(const CompiledRule& rule, const Value& input) {
  if (!rule.ok) return RuleFailure{"compile failure: " + rule.error};
  Outcome out = rule.fn(input);
  if (const auto* v = std::get_if<Value>(&out)) return normalize_output(*v);
  return out;
}

ProgramInterpreter::ProgramInterpreter(TaskKind kind, Translator translator,
                                       PromptLibrary library, sandbox::Limits limits)
    : kind_(kind), translator_(std::move(translator)), library_(std::move(library)),
      limits_(limits) {}

std::string ProgramInterpreter::render_translation_prompt(const std::string& rule_text) const {
  return render_prompt(library_.get(TemplateName::hypothesis_translation),
                       {{"Example description", library_.example_description(kind_)},
                        {"Language reference", sandbox::language_reference()},
                        {"Rule", rule_text}});
}

CompiledRule ProgramInterpreter::compile(const Hypothesis& h) {
  if (!h.well_formed) return compile_failure("ill-formed hypothesis: " + h.error);

  std::string program_source;
  std::string translation_source;
  if (h.form == HypothesisForm::program) {
    program_source = h.payload;
  } else if (h.form == HypothesisForm::natural_language) {
    if (!translator_) return compile_failure("natural-language hypothesis requires a translator");
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = translation_cache_.find(h.payload);
      if (it != translation_cache_.end()) program_source = it->second;
    }
    if (program_source.empty()) {
      std::string reply = translator_(render_translation_prompt(h.payload));
      auto program = scan_for_program(reply);
      if (!program) return compile_failure("translation response contains no parseable program");
      program_source = program->source;
      std::lock_guard<std::mutex> lock(mutex_);
      translation_cache_[h.payload] = program_source;
    }
    translation_source = program_source;
  } else {
    return compile_failure("unsupported hypothesis form for program interpreter");
  }

  sandbox::Program program;
  try {
    program = sandbox::parse_program(program_source);
  } catch (const sandbox::ParseError& e) {
    return compile_failure(e.what());
  }

  CompiledRule out;
  out.ok = true;
  out.translation_source = translation_source;
  out.fn = [program = std::move(program), limits = limits_](const Value& input) -> Outcome {
    try {
      return sandbox::eval_program(program, input, limits);
    } catch (const sandbox::EvalError& e) {
      return RuleFailure{e.what()};
    }
  };
  return out;
}

std::unique_ptr<TaskInterpreter> make_symbolic_interpreter(TaskKind kind, Translator translator,
                                                           PromptLibrary library) {
  switch (kind) {
    case TaskKind::acre:
      return std::make_unique<BlicketInterpreter>();
    case TaskKind::miniscan:
      return std::make_unique<QcfgInterpreter>();
    case TaskKind::listfn:
    case TaskKind::miniarc:
      return std::make_unique<ProgramInterpreter>(kind, std::move(translator), std::move(library));
  }
  return nullptr;
}

}  // namespace inductor
