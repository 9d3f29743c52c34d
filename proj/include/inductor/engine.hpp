#pragma once

#include <string>
#include <utility>
#include <vector>

#include "inductor/interpreter.hpp"
#include "inductor/proposer.hpp"
#include "inductor/value.hpp"

namespace inductor {

struct ScoredHypothesis {
  Hypothesis hypothesis;
  CompiledRule compiled;
  double score = 0.0;  // (# correct) / |seen|
  std::vector<std::pair<Outcome, bool>> predictions;  // per seen example
};

struct IterationRecord {
  int t = 1;
  std::vector<ScoredHypothesis> candidates;
  int selected = 0;          // argmax of score, ties by smallest sample_index
  std::string feedback;      // empty iff the loop stopped here
};

struct RunTrace {
  std::string task_id;
  RunConfig config;
  std::vector<IterationRecord> iterations;
  Hypothesis final_hypothesis;
  std::vector<Outcome> unseen_predictions;
  double a_tau = 0.0;
  CostLedger ledger;
  bool failed = false;
  std::string error;
};

// Best-effort extraction of a value of the task's output type from a free-form
// reply; used by IO/SC prediction and the LM-as-interpreter path.
Outcome lenient_parse(const std::string& reply, TaskKind kind);

class Engine {
 public:
  Engine(PromptLibrary library, CachingClient& client, RunConfig config,
         bool serial_scoring = false);

  // Dispatches on config.method.
  RunTrace run_task(const Task& task);

  RunTrace refine(const Task& task);
  RunTrace io_predict(const Task& task);
  RunTrace sc_predict(const Task& task);
  RunTrace sr_refine(const Task& task);

  // One greedy rule-application completion; unparseable replies are failures.
  Outcome lm_apply(const std::string& rule_text, const Value& input, TaskKind kind);

  ScoredHypothesis score(const Hypothesis& h, const Task& task, TaskInterpreter& interpreter) const;
  static int select_best(const std::vector<ScoredHypothesis>& candidates);
  // Feedback block for every incorrectly predicted seen exemplar, in seen
  // order; failed applications render as "None". Requires best.score < 1.
  static std::string make_feedback(const ScoredHypothesis& best, const Task& task);

 private:
  RunTrace refine_loop(const Task& task, bool lm_interpreter);
  std::vector<ScoredHypothesis> score_candidates(const std::vector<Hypothesis>& hyps,
                                                 const Task& task,
                                                 TaskInterpreter* interpreter,
                                                 bool lm_interpreter);
  std::string greedy_complete(const std::string& prompt, int max_tokens);
  Translator make_translator();

  PromptLibrary library_;
  CachingClient& client_;
  RunConfig config_;
  bool serial_scoring_;
};

}  // namespace inductor
