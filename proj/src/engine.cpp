#include "inductor/engine.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace inductor {

namespace {

std::string make_test_block(const Value& input) {
  return PromptLibrary::format_io("Input", input) + "\nOutput:";
}

std::string render_outcome(const Outcome& o) {
  if (const auto* v = std::get_if<Value>(&o)) return render_value(*v);
  return "None";
}

}  // namespace

Outcome lenient_parse(const std::string& reply, TaskKind kind) {
  switch (kind) {
    case TaskKind::acre: {
      std::string word;
      for (size_t i = 0; i <= reply.size(); ++i) {
        if (i < reply.size() && std::isalpha(static_cast<unsigned char>(reply[i]))) {
          word += static_cast<char>(std::tolower(static_cast<unsigned char>(reply[i])));
        } else if (!word.empty()) {
          if (auto l = label_from_text(word)) return Value{*l};
          word.clear();
        }
      }
      return RuleFailure{"no label keyword in reply"};
    }
    case TaskKind::listfn: {
      for (size_t i = reply.find('['); i != std::string::npos; i = reply.find('[', i + 1)) {
        try {
          return Value{parse_value(reply.substr(i, reply.find(']', i) - i + 1),
                                   TaskKind::listfn, ValueSide::output)};
        } catch (const FormatError&) {
        }
      }
      return RuleFailure{"no list literal in reply"};
    }
    case TaskKind::miniarc: {
      size_t start = reply.rfind("Output");
      std::string body = start == std::string::npos ? reply : reply.substr(start);
      static const std::regex row_re(R"(\[[0-9,\s]*\])");
      std::string rows;
      for (auto it = std::sregex_iterator(body.begin(), body.end(), row_re);
           it != std::sregex_iterator(); ++it)
        rows += it->str() + "\n";
      if (rows.empty()) return RuleFailure{"no grid rows in reply"};
      try {
        return Value{parse_value(rows, TaskKind::miniarc, ValueSide::output)};
      } catch (const FormatError& e) {
        return RuleFailure{std::string("grid parse failed: ") + e.what()};
      }
    }
    case TaskKind::miniscan: {
      std::string line;
      size_t marker = reply.find("Output:");
      if (marker != std::string::npos) {
        size_t eol = reply.find('\n', marker);
        line = reply.substr(marker + 7, eol == std::string::npos ? std::string::npos
                                                                 : eol - marker - 7);
      } else {
        std::istringstream is(reply);
        while (std::getline(is, line))
          if (line.find_first_not_of(" \t\r") != std::string::npos) break;
      }
      try {
        return Value{parse_value(line, TaskKind::miniscan, ValueSide::output)};
      } catch (const FormatError&) {
        return RuleFailure{"no token sequence in reply"};
      }
    }
  }
  return RuleFailure{"unknown kind"};
}

Engine::Engine(PromptLibrary library, CachingClient& client, RunConfig config,
               bool serial_scoring)
    : library_(std::move(library)), client_(client), config_(config),
      serial_scoring_(serial_scoring) {}

std::string Engine::greedy_complete(const std::string& prompt, int max_tokens) {
  LmRequest req{config_.model_name, prompt, 0.0, max_tokens};
  return client_.complete(req, 0).text;
}

Translator Engine::make_translator() {
  return [this](const std::string& prompt) { return greedy_complete(prompt, 2048); };
}

RunTrace Engine::run_task(const Task& task) {
  try {
    switch (config_.method) {
      case Method::io: return io_predict(task);
      case Method::sc: return sc_predict(task);
      case Method::sr: return sr_refine(task);
      case Method::refine: return refine(task);
    }
  } catch (const TransportError& e) {
    RunTrace t;
    t.task_id = task.id;
    t.config = config_;
    t.failed = true;
    t.error = e.what();
    t.ledger = client_.ledger();
    return t;
  }
  throw std::logic_error("unknown method");
}

ScoredHypothesis Engine::score(const Hypothesis& h, const Task& task,
                               TaskInterpreter& interpreter) const {
  ScoredHypothesis out;
  out.hypothesis = h;
  out.compiled = interpreter.compile(h);
  int correct = 0;
  for (const auto& ex : task.seen) {
    Outcome pred = apply_rule(out.compiled, ex.input);
    bool ok = !is_failure(pred) && values_equal(std::get<Value>(pred), ex.output);
    correct += ok;
    out.predictions.emplace_back(std::move(pred), ok);
  }
  out.score = task.seen.empty() ? 0.0 : static_cast<double>(correct) / task.seen.size();
  return out;
}

int Engine::select_best(const std::vector<ScoredHypothesis>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_best: empty candidate set");
  int best = 0;
  for (int i = 1; i < static_cast<int>(candidates.size()); ++i)
    if (candidates[i].score > candidates[best].score) best = i;
  return best;
}

std::string Engine::make_feedback(const ScoredHypothesis& best, const Task& task) {
  std::string out;
  for (size_t i = 0; i < task.seen.size(); ++i) {
    if (best.predictions[i].second) continue;
    if (!out.empty()) out += "\n\n";
    out += PromptLibrary::format_io("Input", task.seen[i].input) + "\n";
    out += PromptLibrary::format_io("Expected output", task.seen[i].output) + "\n";
    const Outcome& pred = best.predictions[i].first;
    if (is_failure(pred))
      out += "Actual output: None";
    else
      out += PromptLibrary::format_io("Actual output", std::get<Value>(pred));
  }
  return out;
}

std::vector<ScoredHypothesis> Engine::score_candidates(const std::vector<Hypothesis>& hyps,
                                                       const Task& task,
                                                       TaskInterpreter* interpreter,
                                                       bool lm_interpreter) {
  std::vector<ScoredHypothesis> out(hyps.size());
  if (lm_interpreter) {
    // LM application is a network path; keep it sequential and cached.
    for (size_t i = 0; i < hyps.size(); ++i) {
      ScoredHypothesis s;
      s.hypothesis = hyps[i];
      int correct = 0;
      for (const auto& ex : task.seen) {
        Outcome pred = hyps[i].well_formed
                           ? lm_apply(hyps[i].payload, ex.input, task.kind)
                           : Outcome{RuleFailure{"ill-formed hypothesis"}};
        bool ok = !is_failure(pred) && values_equal(std::get<Value>(pred), ex.output);
        correct += ok;
        s.predictions.emplace_back(std::move(pred), ok);
      }
      s.score = task.seen.empty() ? 0.0 : static_cast<double>(correct) / task.seen.size();
      out[i] = std::move(s);
    }
    return out;
  }

  // Compile serially (may consult the translator), apply in parallel.
  for (size_t i = 0; i < hyps.size(); ++i) {
    out[i].hypothesis = hyps[i];
    out[i].compiled = interpreter->compile(hyps[i]);
  }
  int n = static_cast<int>(hyps.size());
#pragma omp parallel for schedule(dynamic) if (!serial_scoring_)
  for (int i = 0; i < n; ++i) {
    int correct = 0;
    for (const auto& ex : task.seen) {
      Outcome pred = apply_rule(out[i].compiled, ex.input);
      bool ok = !is_failure(pred) && values_equal(std::get<Value>(pred), ex.output);
      correct += ok;
      out[i].predictions.emplace_back(std::move(pred), ok);
    }
    out[i].score = task.seen.empty() ? 0.0 : static_cast<double>(correct) / task.seen.size();
  }
  return out;
}

RunTrace Engine::refine(const Task& task) { return refine_loop(task, false); }
RunTrace Engine::sr_refine(const Task& task) { return refine_loop(task, true); }

RunTrace Engine::refine_loop(const Task& task, bool lm_interpreter) {
  RunTrace trace;
  trace.task_id = task.id;
  trace.config = config_;

  std::unique_ptr<TaskInterpreter> interpreter;
  if (!lm_interpreter)
    interpreter = make_symbolic_interpreter(task.kind, make_translator(), library_);

  const int T = config_.max_iterations;
  const int N = config_.samples_per_iteration;
  std::optional<ScoredHypothesis> best_overall;
  std::string feedback;

  for (int t = 1; t <= T; ++t) {
    std::string prompt;
    if (t == 1) {
      prompt = render_prompt(
          library_.get(TemplateName::hypothesis_generation),
          {{"Task description", library_.task_description(task.kind, config_.noisy_prompt)},
           {"Examples", PromptLibrary::format_examples(task.seen)},
           {"Rule format", library_.rule_format(task.kind)}});
    } else {
      const ScoredHypothesis& basis = *best_overall;
      prompt = render_prompt(
          library_.get(TemplateName::hypothesis_refinement),
          {{"Rule", basis.hypothesis.payload},
           {"Feedback", feedback},
           {"Feedback description", library_.feedback_description(task.kind, config_.noisy_prompt)},
           {"Rule format", library_.rule_format(task.kind)}});
    }

    auto responses = propose(client_, config_.model_name, prompt, N, config_.temperature_for(N));
    std::vector<Hypothesis> hyps;
    for (int i = 0; i < N; ++i) {
      Hypothesis h = extract_rule(responses[static_cast<size_t>(i)], task.kind);
      h.iteration = t;
      h.sample_index = i;
      hyps.push_back(std::move(h));
    }

    IterationRecord record;
    record.t = t;
    record.candidates = score_candidates(hyps, task, interpreter.get(), lm_interpreter);
    record.selected = select_best(record.candidates);

    const ScoredHypothesis& selected = record.candidates[static_cast<size_t>(record.selected)];
    if (!best_overall || selected.score > best_overall->score) best_overall = selected;

    const ScoredHypothesis& basis = config_.carry_best
                                        ? *best_overall
                                        : record.candidates[static_cast<size_t>(record.selected)];
    if (basis.score >= 1.0 || t == T) {
      trace.iterations.push_back(std::move(record));
      break;
    }
    feedback = make_feedback(basis, task);
    record.feedback = feedback;
    trace.iterations.push_back(std::move(record));
  }

  trace.final_hypothesis = best_overall->hypothesis;
  for (const auto& ex : task.unseen) {
    Outcome pred;
    if (lm_interpreter) {
      pred = best_overall->hypothesis.well_formed
                 ? lm_apply(best_overall->hypothesis.payload, ex.input, task.kind)
                 : Outcome{RuleFailure{"ill-formed hypothesis"}};
    } else {
      pred = apply_rule(best_overall->compiled, ex.input);
    }
    trace.unseen_predictions.push_back(std::move(pred));
  }
  int correct = 0;
  for (size_t i = 0; i < task.unseen.size(); ++i) {
    const Outcome& pred = trace.unseen_predictions[i];
    correct += !is_failure(pred) && values_equal(std::get<Value>(pred), task.unseen[i].output);
  }
  trace.a_tau = task.unseen.empty() ? 0.0 : static_cast<double>(correct) / task.unseen.size();
  trace.ledger = client_.ledger();
  return trace;
}

RunTrace Engine::io_predict(const Task& task) {
  RunTrace trace;
  trace.task_id = task.id;
  trace.config = config_;
  std::string examples = PromptLibrary::format_examples(task.seen);
  int correct = 0;
  for (const auto& ex : task.unseen) {
    std::string prompt = render_prompt(
        library_.get(TemplateName::io_prediction),
        {{"Example description", library_.example_description(task.kind)},
         {"Examples", examples},
         {"Test input", make_test_block(ex.input)}});
    Outcome pred = lenient_parse(greedy_complete(prompt, 1024), task.kind);
    correct += !is_failure(pred) && values_equal(std::get<Value>(pred), ex.output);
    trace.unseen_predictions.push_back(std::move(pred));
  }
  trace.a_tau = task.unseen.empty() ? 0.0 : static_cast<double>(correct) / task.unseen.size();
  trace.ledger = client_.ledger();
  return trace;
}

RunTrace Engine::sc_predict(const Task& task) {
  RunTrace trace;
  trace.task_id = task.id;
  trace.config = config_;
  const int N = config_.samples_per_iteration;
  std::string examples = PromptLibrary::format_examples(task.seen);
  int correct = 0;
  for (const auto& ex : task.unseen) {
    std::string prompt = render_prompt(
        library_.get(TemplateName::io_prediction),
        {{"Example description", library_.example_description(task.kind)},
         {"Examples", examples},
         {"Test input", make_test_block(ex.input)}});
    auto replies = propose(client_, config_.model_name, prompt, N, config_.temperature_for(N));

    // Majority over normalized rendered values; ties go to the first-sampled
    // among the tied values.
    std::vector<std::pair<std::string, Value>> parsed;  // (rendered key, value)
    std::map<std::string, int> counts;
    for (const auto& reply : replies) {
      Outcome o = lenient_parse(reply, task.kind);
      if (is_failure(o)) continue;
      Value v = normalize_output(std::get<Value>(o));
      std::string key = render_value(v);
      parsed.emplace_back(key, std::move(v));
      ++counts[key];
    }
    Outcome pred = RuleFailure{"no parseable prediction"};
    int best_count = 0;
    for (const auto& [key, value] : parsed) {
      if (counts[key] > best_count) {
        best_count = counts[key];
        pred = value;
      }
    }
    correct += !is_failure(pred) && values_equal(std::get<Value>(pred), ex.output);
    trace.unseen_predictions.push_back(std::move(pred));
  }
  trace.a_tau = task.unseen.empty() ? 0.0 : static_cast<double>(correct) / task.unseen.size();
  trace.ledger = client_.ledger();
  return trace;
}

Outcome Engine::lm_apply(const std::string& rule_text, const Value& input, TaskKind kind) {
  std::string prompt = render_prompt(
      library_.get(TemplateName::rule_application),
      {{"Example description", library_.example_description(kind)},
       {"Rule", rule_text},
       {"Test input", make_test_block(input)}});
  try {
    return lenient_parse(greedy_complete(prompt, 1024), kind);
  } catch (const TransportError& e) {
    return RuleFailure{std::string("transport failure: ") + e.what()};
  }
}

}  // namespace inductor
