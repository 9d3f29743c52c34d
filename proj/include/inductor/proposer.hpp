#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "inductor/value.hpp"

namespace inductor {

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TemplateName {
  hypothesis_generation,
  hypothesis_refinement,
  hypothesis_translation,
  rule_application,
  io_prediction,
};

struct PromptTemplate {
  TemplateName name;
  std::string body;
};

// Byte-exact substitution of {Placeholder} markers. Throws PromptError when a
// known placeholder in the body has no binding.
std::string render_prompt(const PromptTemplate& t, const std::map<std::string, std::string>& bindings);

// Template bodies and per-dataset placeholder values (task description,
// example description, rule format). Defaults are embedded; a directory of
// override files (<template>.txt) may replace individual bodies.
class PromptLibrary {
 public:
  PromptLibrary() = default;
  explicit PromptLibrary(const std::string& override_dir);

  const PromptTemplate& get(TemplateName name) const;
  std::string task_description(TaskKind kind, bool noisy_prompt) const;
  std::string example_description(TaskKind kind) const;
  std::string feedback_description(TaskKind kind, bool noisy_prompt) const;
  std::string rule_format(TaskKind kind) const;

  // "Input: ...\nOutput: ..." blocks separated by blank lines; grids render
  // with the value on the following lines.
  static std::string format_examples(const std::vector<Example>& examples);
  static std::string format_io(const std::string& tag, const Value& v);

 private:
  std::map<TemplateName, PromptTemplate> overrides_;
};

struct LmRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
};

struct LmResponse {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ModelRates {
  double prompt_per_1k = 0.03;      // dollars
  double completion_per_1k = 0.06;  // dollars
};

struct CostLedger {
  long api_calls = 0;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  double estimated_cost = 0.0;  // dollars

  void add(const LmResponse& r, const ModelRates& rates);
  CostLedger& operator+=(const CostLedger& other);
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual LmResponse complete(const LmRequest& req, int sample_index) = 0;
};

// Deterministic replay backend: pops queued responses in order. Token counts
// are whitespace-token approximations.
class ScriptedBackend : public CompletionBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<std::string> responses);
  void push(const std::string& response);
  LmResponse complete(const LmRequest& req, int sample_index) override;
  size_t remaining() const { return queue_.size(); }

 private:
  std::deque<std::string> queue_;
  std::mutex mutex_;
};

// OpenAI-style chat-completion endpoint; single user message, empty system
// message. Retries with exponential backoff (max 5 attempts).
class HttpBackend : public CompletionBackend {
 public:
  HttpBackend(std::string base_url, std::string api_key);
  LmResponse complete(const LmRequest& req, int sample_index) override;

  // Reads INDUCTOR_BASE_URL / INDUCTOR_API_KEY (OPENAI_* fall-backs).
  static std::unique_ptr<HttpBackend> from_env();

 private:
  std::string base_url_;
  std::string api_key_;
};

// File-per-key cache in front of a backend. Key = hash(model, prompt,
// temperature, sample_index). The ledger counts misses only.
class CachingClient {
 public:
  CachingClient(CompletionBackend* backend, std::string cache_dir, ModelRates rates = {});

  LmResponse complete(const LmRequest& req, int sample_index);

  const CostLedger& ledger() const { return ledger_; }
  void reset_ledger() { ledger_ = {}; }
  long network_calls() const { return network_calls_; }

 private:
  CompletionBackend* backend_;
  std::string cache_dir_;  // empty = caching disabled
  ModelRates rates_;
  CostLedger ledger_;
  long network_calls_ = 0;
  std::mutex mutex_;
};

std::string cache_key(const LmRequest& req, int sample_index);

// Samples n completions: greedy when n = 1, temperature_multi otherwise.
std::vector<std::string> propose(CachingClient& client, const std::string& model,
                                 const std::string& prompt, int n, double temperature,
                                 int max_tokens = 1024);

// Extracts the rule payload from a proposer response per the task's rule
// format. A missing or malformed rule marks the hypothesis ill-formed
// (well_formed = false); it is never an exception.
Hypothesis extract_rule(const std::string& text, TaskKind kind);

}  // namespace inductor
