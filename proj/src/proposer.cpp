#include "inductor/proposer.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#ifdef INDUCTOR_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace inductor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* template_file_name(TemplateName n) {
  switch (n) {
    case TemplateName::hypothesis_generation: return "hypothesis_generation";
    case TemplateName::hypothesis_refinement: return "hypothesis_refinement";
    case TemplateName::hypothesis_translation: return "hypothesis_translation";
    case TemplateName::rule_application: return "rule_application";
    case TemplateName::io_prediction: return "io_prediction";
  }
  return "?";
}

const std::map<TemplateName, std::string>& default_templates() {
  static const std::map<TemplateName, std::string> bodies = {
      {TemplateName::hypothesis_generation,
       "Generate a rule that maps the following inputs to their corresponding outputs."
       "{Task description}\n\n{Examples}\n\nPlease format your rule as follows:\n\n"
       "Rule: {Rule format}"},
      {TemplateName::hypothesis_refinement,
       "Your rule: {Rule}\n\nThis rule does not work for the following examples.\n\n"
       "{Feedback}\n\nGenerate a new rule that maps the given inputs to their "
       "corresponding outputs.{Feedback description} Please format your rule as follows:\n\n"
       "Rule: {Rule format}"},
      {TemplateName::hypothesis_translation,
       "You are an expert programmer in a small functional language. Write a program in "
       "this language for the following rule. {Example description}\n\n"
       "The language is defined as follows:\n\n{Language reference}\n\n"
       "Rule: {Rule}\n\nRespond with the program only."},
      {TemplateName::rule_application,
       "Generate an output corresponding to the given input based on the rule. "
       "{Example description}\n\nRule: {Rule}\n\n{Test input}"},
      {TemplateName::io_prediction,
       "Generate an output corresponding to the given input based on the examples. "
       "{Example description}\n\n{Examples}\n\n{Test input}"},
  };
  return bodies;
}

const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> names = {
      "Task description", "Examples",         "Rule format", "Rule",
      "Feedback",         "Feedback description", "Example description",
      "Test input",       "Language reference"};
  return names;
}

constexpr const char* kNoisyNote =
    "Note that some examples may be noisy, and you should take this into account "
    "when proposing the rule.";

long approx_tokens(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  long n = 0;
  while (is >> tok) ++n;
  return n;
}

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string render_prompt(const PromptTemplate& t, const std::map<std::string, std::string>& bindings) {
  std::string out;
  const std::string& body = t.body;
  size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      size_t close = body.find('}', i);
      if (close != std::string::npos) {
        std::string name = body.substr(i + 1, close - i - 1);
        if (known_placeholders().count(name)) {
          auto it = bindings.find(name);
          if (it == bindings.end())
            throw PromptError("unbound placeholder {" + name + "}");
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += body[i++];
  }
  return out;
}

PromptLibrary::PromptLibrary(const std::string& override_dir) {
  for (const auto& [name, body] : default_templates()) {
    fs::path p = fs::path(override_dir) / (std::string(template_file_name(name)) + ".txt");
    if (fs::exists(p)) {
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      overrides_[name] = PromptTemplate{name, ss.str()};
    }
  }
}

const PromptTemplate& PromptLibrary::get(TemplateName name) const {
  auto it = overrides_.find(name);
  if (it != overrides_.end()) return it->second;
  static std::map<TemplateName, PromptTemplate> defaults;
  static std::once_flag once;
  std::call_once(once, [] {
    for (const auto& [n, body] : default_templates()) defaults[n] = PromptTemplate{n, body};
  });
  return defaults.at(name);
}

std::string PromptLibrary::task_description(TaskKind kind, bool noisy_prompt) const {
  switch (kind) {
    case TaskKind::acre:
      return " Each example is an input-output pair. The input is a list of objects. The "
             "presence of certain objects will trigger the light to turn on. The output is "
             "either \"on\" or \"off\", indicating the state of the light. For each object, "
             "determine whether it triggers the light to turn on, does not trigger it, or "
             "if it's undetermined.";
    case TaskKind::miniscan:
      return " Your grammar rules should follow the format \"<input> -> <output>\". Use the "
             "prefix \"##\" to denote a nonterminal symbol. For instance, \"##A twice -> "
             "##A ##A\". The left-hand side cannot contain repetitive nonterminal symbols; "
             "i.e., rules like \"##A ##A -> ##A twice\" or \"##A and ##A -> ##A twice\" are "
             "not allowed. Ensure that the number of unique nonterminal symbols on the "
             "left-hand side matches that on the right-hand side in your rules. For each "
             "rule, assign an integer as its priority. A higher priority indicates that the "
             "rule should be considered first when generating parses. Try to make your "
             "rules as minimal as possible.";
    case TaskKind::listfn:
      return noisy_prompt ? std::string(" ") + kNoisyNote : "";
    case TaskKind::miniarc:
      return "";
  }
  return "";
}

std::string PromptLibrary::example_description(TaskKind kind) const {
  switch (kind) {
    case TaskKind::acre:
      return "Each example is an input-output pair. The input is a list of objects. The "
             "presence of certain objects will trigger the light to turn on. The output is "
             "either \"on\", \"off\", or \"undetermined\", indicating the state of the "
             "light or if the state of the light cannot be determined. The rule indicates "
             "whether each object triggers the light to turn on, does not trigger it, or "
             "if it's undetermined.";
    case TaskKind::miniscan:
      return "The grammar rules follow the format \"<input> -> <output>\". The \"##\" "
             "prefix denotes a nonterminal symbol. For instance, ##A twice -> ##A ##A. "
             "Each rule has an associated priority. A higher priority indicates that the "
             "rule should be considered first when generating parses. The output is a "
             "sequence of tokens joined by spaces.";
    case TaskKind::listfn:
      return "The input is a list of integers. The output is also a list of integers.";
    case TaskKind::miniarc:
      return "The input is a 2D grid of integers. The output is also a 2D grid of "
             "integers.";
  }
  return "";
}

std::string PromptLibrary::feedback_description(TaskKind kind, bool noisy_prompt) const {
  if (kind == TaskKind::listfn && noisy_prompt) return std::string(" ") + kNoisyNote;
  return "";
}

std::string PromptLibrary::rule_format(TaskKind kind) const {
  switch (kind) {
    case TaskKind::acre:
      return "{\"object 1\": <\"on\"/\"off\"/\"undetermined\">, \"object 2\": "
             "<\"on\"/\"off\"/\"undetermined\">, ...}";
    case TaskKind::miniscan:
      return "Rule 1: <Your rule>\nPriority 1: <Your priority>\n...";
    case TaskKind::listfn:
    case TaskKind::miniarc:
      return "<Your rule>";
  }
  return "";
}

std::string PromptLibrary::format_io(const std::string& tag, const Value& v) {
  if (renders_multiline(v)) return tag + ":\n" + render_value(v);
  return tag + ": " + render_value(v);
}

std::string PromptLibrary::format_examples(const std::vector<Example>& examples) {
  std::string out;
  for (size_t i = 0; i < examples.size(); ++i) {
    if (i) out += "\n\n";
    out += format_io("Input", examples[i].input) + "\n" + format_io("Output", examples[i].output);
  }
  return out;
}

void CostLedger::add(const LmResponse& r, const ModelRates& rates) {
  ++api_calls;
  prompt_tokens += r.prompt_tokens;
  completion_tokens += r.completion_tokens;
  estimated_cost += r.prompt_tokens / 1000.0 * rates.prompt_per_1k +
                    r.completion_tokens / 1000.0 * rates.completion_per_1k;
}

CostLedger& CostLedger::operator+=(const CostLedger& other) {
  api_calls += other.api_calls;
  prompt_tokens += other.prompt_tokens;
  completion_tokens += other.completion_tokens;
  estimated_cost += other.estimated_cost;
  return *this;
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses) {
  for (auto& r : responses) queue_.push_back(std::move(r));
}

void ScriptedBackend::push(const std::string& response) { queue_.push_back(response); }

LmResponse ScriptedBackend::complete(const LmRequest& req, int /*sample_index*/) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (queue_.empty()) throw TransportError("scripted backend: response queue exhausted");
  LmResponse r;
  r.text = std::move(queue_.front());
  queue_.pop_front();
  r.prompt_tokens = approx_tokens(req.prompt);
  r.completion_tokens = approx_tokens(r.text);
  return r;
}

HttpBackend::HttpBackend(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::unique_ptr<HttpBackend> HttpBackend::from_env() {
  const char* url = std::getenv("INDUCTOR_BASE_URL");
  if (!url) url = std::getenv("OPENAI_BASE_URL");
  const char* key = std::getenv("INDUCTOR_API_KEY");
  if (!key) key = std::getenv("OPENAI_API_KEY");
  if (!key) return nullptr;
  return std::make_unique<HttpBackend>(url ? url : "https://api.openai.com/v1", key);
}

LmResponse HttpBackend::complete(const LmRequest& req, int /*sample_index*/) {
  // Split "scheme://host[:port]/prefix" into origin and path prefix.
  size_t scheme = base_url_.find("://");
  size_t path_start =
      base_url_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  std::string origin = path_start == std::string::npos ? base_url_ : base_url_.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base_url_.substr(path_start);

  json body = {
      {"model", req.model},
      {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
      {"temperature", req.temperature},
      {"max_tokens", req.max_tokens},
  };
  std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt < 5; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(500 * (1 << (attempt - 1))));
    httplib::Client client(origin);
    client.set_read_timeout(120, 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(prefix + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      json j = json::parse(res->body);
      LmResponse out;
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage")) {
        out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        out.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
      return out;
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed completion response: ") + e.what());
    }
  }
  throw TransportError("request failed after 5 attempts: " + last_error);
}

std::string cache_key(const LmRequest& req, int sample_index) {
  // FNV-1a, 64-bit; stable across platforms.
  auto mix = [](uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
    return h;
  };
  char temp[32];
  std::snprintf(temp, sizeof(temp), "%.6g", req.temperature);
  uint64_t h = 1469598103934665603ull;
  h = mix(h, req.model);
  h = mix(h, req.prompt);
  h = mix(h, temp);
  h = mix(h, std::to_string(sample_index));
  char out[24];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

CachingClient::CachingClient(CompletionBackend* backend, std::string cache_dir, ModelRates rates)
    : backend_(backend), cache_dir_(std::move(cache_dir)), rates_(rates) {
  if (!cache_dir_.empty()) fs::create_directories(cache_dir_);
}

LmResponse CachingClient::complete(const LmRequest& req, int sample_index) {
  fs::path entry;
  if (!cache_dir_.empty()) {
    entry = fs::path(cache_dir_) / (cache_key(req, sample_index) + ".json");
    if (fs::exists(entry)) {
      try {
        std::ifstream in(entry);
        json j = json::parse(in);
        LmResponse r;
        r.text = j.at("response").at("text").get<std::string>();
        r.prompt_tokens = j.at("response").value("prompt_tokens", 0);
        r.completion_tokens = j.at("response").value("completion_tokens", 0);
        return r;
      } catch (const std::exception& e) {
        std::fprintf(stderr, "warning: corrupt cache entry %s (%s); refetching\n",
                     entry.string().c_str(), e.what());
      }
    }
  }

  LmResponse r = backend_->complete(req, sample_index);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    ++network_calls_;
    ledger_.add(r, rates_);
  }
  if (!cache_dir_.empty()) {
    json j = {{"request",
               {{"model", req.model},
                {"prompt", req.prompt},
                {"temperature", req.temperature},
                {"max_tokens", req.max_tokens},
                {"sample_index", sample_index}}},
              {"response",
               {{"text", r.text},
                {"prompt_tokens", r.prompt_tokens},
                {"completion_tokens", r.completion_tokens}}}};
    fs::path tmp = entry;
    tmp += ".tmp." + std::to_string(
                         std::hash<std::thread::id>{}(std::this_thread::get_id()) & 0xffff);
    std::ofstream out(tmp);
    out << j.dump(2);
    out.close();
    fs::rename(tmp, entry);
  }
  return r;
}

std::vector<std::string> propose(CachingClient& client, const std::string& model,
                                 const std::string& prompt, int n, double temperature,
                                 int max_tokens) {
  if (n < 1) throw PromptError("propose: n must be >= 1");
  LmRequest req{model, prompt, temperature, max_tokens};
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(client.complete(req, i).text);
  return out;
}

Hypothesis extract_rule(const std::string& text, TaskKind kind) {
  Hypothesis h;
  h.raw_text = text;

  auto ill_formed = [&](const std::string& why) {
    h.well_formed = false;
    h.error = why;
    return h;
  };

  switch (kind) {
    case TaskKind::acre: {
      h.form = HypothesisForm::blicket_map;
      size_t marker = text.find("Rule:");
      if (marker == std::string::npos) return ill_formed("no 'Rule:' marker");
      size_t open = text.find('{', marker);
      if (open == std::string::npos) return ill_formed("no '{' after 'Rule:'");
      int depth = 0;
      bool in_string = false;
      for (size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
          if (c == '\\') ++i;
          else if (c == '"') in_string = false;
        } else if (c == '"') {
          in_string = true;
        } else if (c == '{') {
          ++depth;
        } else if (c == '}' && --depth == 0) {
          h.payload = text.substr(open, i - open + 1);
          return h;
        }
      }
      return ill_formed("unbalanced '{' after 'Rule:'");
    }
    case TaskKind::miniscan: {
      h.form = HypothesisForm::grammar;
      static const std::regex block_start(R"(Rule\s*\d+\s*:)");
      std::smatch m;
      if (!std::regex_search(text, m, block_start))
        return ill_formed("no 'Rule <k>:' block");
      h.payload = trim_copy(text.substr(static_cast<size_t>(m.position())));
      return h;
    }
    case TaskKind::listfn:
    case TaskKind::miniarc: {
      size_t fence = text.find("```");
      if (fence != std::string::npos) {
        size_t body_start = text.find('\n', fence);
        size_t fence_end = body_start == std::string::npos
                               ? std::string::npos
                               : text.find("```", body_start);
        if (body_start != std::string::npos && fence_end != std::string::npos) {
          h.form = HypothesisForm::program;
          h.payload = trim_copy(text.substr(body_start + 1, fence_end - body_start - 1));
          if (h.payload.empty()) return ill_formed("empty fenced block");
          return h;
        }
      }
      size_t marker = text.find("Rule:");
      if (marker == std::string::npos) return ill_formed("no 'Rule:' marker");
      h.form = HypothesisForm::natural_language;
      h.payload = trim_copy(text.substr(marker + 5));
      if (h.payload.empty()) return ill_formed("empty rule text");
      return h;
    }
  }
  return ill_formed("unknown kind");
}

}  // namespace inductor
