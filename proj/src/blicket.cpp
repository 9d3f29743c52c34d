#include "inductor/blicket.hpp"

#include <json.hpp>

namespace inductor {

namespace {

// First balanced top-level {...} region, respecting string literals.
std::string first_balanced_object(const std::string& text) {
  size_t start = text.find('{');
  if (start == std::string::npos) throw BlicketError("no '{' found in rule payload");
  int depth = 0;
  bool in_string = false;
  for (size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  throw BlicketError("unbalanced '{' in rule payload");
}

}  // namespace

BlicketRule parse_blicket_rule(const std::string& payload) {
  std::string body = first_balanced_object(payload);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw BlicketError(std::string("rule is not a JSON object: ") + e.what());
  }
  if (!j.is_object()) throw BlicketError("rule is not a JSON object");
  BlicketRule rule;
  for (auto& [key, val] : j.items()) {
    if (!val.is_string())
      throw BlicketError("label for \"" + key + "\" is not a string");
    auto label = label_from_text(val.get<std::string>());
    if (!label)
      throw BlicketError("label for \"" + key + "\" is outside on/off/undetermined: " +
                         val.get<std::string>());
    rule.labels[normalize_description(key)] = *label;
  }
  return rule;
}

Label apply_blicket(const BlicketRule& rule, const ObjectSet& objects) {
  bool any_undetermined = false;
  for (const auto& obj : objects.objects) {
    auto it = rule.labels.find(normalize_description(obj));
    if (it == rule.labels.end()) {
      any_undetermined = true;
    } else if (it->second == Label::on) {
      return Label::on;
    } else if (it->second == Label::undetermined) {
      any_undetermined = true;
    }
  }
  return any_undetermined ? Label::undetermined : Label::off;
}

}  // namespace inductor
