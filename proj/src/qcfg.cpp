#include "inductor/qcfg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace inductor {

namespace {

std::vector<GrammarSymbol> parse_symbols(const std::string& text, int rule_no) {
  std::vector<GrammarSymbol> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') {
      size_t skip = tok.size() > 1 && tok[1] == '#' ? 2 : 1;
      std::string id = tok.substr(skip);
      if (id.empty())
        throw GrammarError("rule " + std::to_string(rule_no) + ": bare '#' is not a symbol");
      out.push_back({true, id});
    } else {
      out.push_back({false, tok});
    }
  }
  return out;
}

void validate_rule(const GrammarRule& r, int rule_no) {
  auto where = [rule_no] { return "rule " + std::to_string(rule_no) + ": "; };
  if (r.lhs.empty()) throw GrammarError(where() + "empty left-hand side");
  if (r.rhs.empty()) throw GrammarError(where() + "empty right-hand side");
  std::set<std::string> lhs_nts, rhs_nts;
  bool has_terminal = false;
  for (const auto& s : r.lhs) {
    if (s.nonterminal) {
      if (!lhs_nts.insert(s.text).second)
        throw GrammarError(where() + "repeated nonterminal ##" + s.text + " on left-hand side");
    } else {
      has_terminal = true;
    }
  }
  for (const auto& s : r.rhs)
    if (s.nonterminal) rhs_nts.insert(s.text);
  if (lhs_nts != rhs_nts)
    throw GrammarError(where() + "nonterminal sets on left- and right-hand sides differ");
  if (!has_terminal)
    throw GrammarError(where() + "no terminal on left-hand side");
}

struct Binding {
  std::string id;
  int lo, hi;
};

// Enumerates segmentations of toks[lo, hi) by the rule's lhs: terminals must
// match exactly, nonterminal spans assigned left-to-right shortest-first.
// Returns true as soon as the callback accepts an assignment.
bool match_lhs(const std::vector<GrammarSymbol>& lhs, const std::vector<std::string>& toks,
               int hi, size_t idx, int pos, std::vector<Binding>& bindings,
               const std::function<bool(const std::vector<Binding>&)>& cb) {
  if (idx == lhs.size()) return pos == hi && cb(bindings);
  const auto& sym = lhs[idx];
  if (!sym.nonterminal) {
    if (pos < hi && toks[static_cast<size_t>(pos)] == sym.text)
      return match_lhs(lhs, toks, hi, idx + 1, pos + 1, bindings, cb);
    return false;
  }
  int remaining = static_cast<int>(lhs.size() - idx - 1);
  for (int len = 1; pos + len + remaining <= hi; ++len) {
    bindings.push_back({sym.text, pos, pos + len});
    if (match_lhs(lhs, toks, hi, idx + 1, pos + len, bindings, cb)) return true;
    bindings.pop_back();
  }
  return false;
}

using Seq = std::vector<std::string>;

Seq build_output(const GrammarRule& rule, const std::map<std::string, Seq>& sub) {
  Seq out;
  for (const auto& s : rule.rhs) {
    if (s.nonterminal) {
      const Seq& piece = sub.at(s.text);
      out.insert(out.end(), piece.begin(), piece.end());
    } else {
      out.push_back(s.text);
    }
  }
  return out;
}

std::vector<const GrammarRule*> ordered_rules(const Grammar& g) {
  std::vector<const GrammarRule*> out;
  out.reserve(g.rules.size());
  for (const auto& r : g.rules) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(), [](const GrammarRule* a, const GrammarRule* b) {
    if (a->priority != b->priority) return a->priority < b->priority;
    return a->index < b->index;
  });
  return out;
}

class Deriver {
 public:
  Deriver(const Grammar& g, const std::vector<std::string>& toks)
      : grammar_(g), toks_(toks), ordered_(ordered_rules(g)) {}

  std::optional<Seq> derive_span(int lo, int hi, int depth) {
    if (depth > grammar_.max_depth) {
      depth_hit_ = true;
      return std::nullopt;
    }
    auto key = std::make_pair(lo, hi);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool had_depth_hit = depth_hit_;
    depth_hit_ = false;

    std::optional<Seq> result;
    for (const GrammarRule* rule : ordered_) {
      std::vector<Binding> bindings;
      bool done = match_lhs(rule->lhs, toks_, hi, 0, lo, bindings,
                            [&](const std::vector<Binding>& bs) {
                              std::map<std::string, Seq> sub;
                              for (const auto& b : bs) {
                                auto piece = derive_span(b.lo, b.hi, depth + 1);
                                if (!piece) return false;
                                sub[b.id] = std::move(*piece);
                              }
                              result = build_output(*rule, sub);
                              return true;
                            });
      if (done) break;
    }
    // A failure caused by the depth cutoff is not a property of the span alone.
    if (result || !depth_hit_) memo_[key] = result;
    depth_hit_ = depth_hit_ || had_depth_hit;
    return result;
  }

 private:
  const Grammar& grammar_;
  const std::vector<std::string>& toks_;
  std::vector<const GrammarRule*> ordered_;
  std::map<std::pair<int, int>, std::optional<Seq>> memo_;
  bool depth_hit_ = false;
};

class Enumerator {
 public:
  Enumerator(const Grammar& g, const std::vector<std::string>& toks, int limit)
      : grammar_(g), toks_(toks), limit_(limit), ordered_(ordered_rules(g)) {}

  // Distinct outputs for the span, search order, capped at limit.
  const std::vector<Seq>& enumerate_span(int lo, int hi, int depth) {
    auto key = std::make_pair(lo, hi);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Seq> results;
    if (depth <= grammar_.max_depth) {
      for (const GrammarRule* rule : ordered_) {
        if (static_cast<int>(results.size()) >= limit_) break;
        std::vector<Binding> bindings;
        match_lhs(rule->lhs, toks_, hi, 0, lo, bindings, [&](const std::vector<Binding>& bs) {
          expand(*rule, bs, 0, {}, depth, results);
          return static_cast<int>(results.size()) >= limit_;
        });
      }
    }
    return memo_[key] = std::move(results);
  }

 private:
  void expand(const GrammarRule& rule, const std::vector<Binding>& bs, size_t idx,
              std::map<std::string, Seq> sub, int depth, std::vector<Seq>& results) {
    if (static_cast<int>(results.size()) >= limit_) return;
    if (idx == bs.size()) {
      Seq out = build_output(rule, sub);
      if (std::find(results.begin(), results.end(), out) == results.end())
        results.push_back(std::move(out));
      return;
    }
    // Copy the sub-span alternatives: the memo may be invalidated by recursion.
    std::vector<Seq> options = enumerate_span(bs[idx].lo, bs[idx].hi, depth + 1);
    for (const auto& opt : options) {
      sub[bs[idx].id] = opt;
      expand(rule, bs, idx + 1, sub, depth, results);
      if (static_cast<int>(results.size()) >= limit_) return;
    }
  }

  const Grammar& grammar_;
  const std::vector<std::string>& toks_;
  int limit_;
  std::vector<const GrammarRule*> ordered_;
  std::map<std::pair<int, int>, std::vector<Seq>> memo_;
};

}  // namespace

void validate_grammar(const Grammar& g) {
  if (g.rules.empty()) throw GrammarError("grammar has no rules");
  bool has_primitive = false;
  for (const auto& r : g.rules) {
    validate_rule(r, r.index + 1);
    bool all_terminal = std::none_of(r.lhs.begin(), r.lhs.end(),
                                     [](const GrammarSymbol& s) { return s.nonterminal; });
    has_primitive = has_primitive || all_terminal;
  }
  if (!has_primitive) throw GrammarError("grammar has no all-terminal (primitive) rule");
}

Grammar parse_grammar(const std::string& payload) {
  static const std::regex rule_re(R"(^\s*Rule\s*(\d+)\s*:\s*(.*?)\s*$)");
  static const std::regex prio_re(R"(^\s*Priority\s*(\d+)\s*:\s*(-?\d+)\s*$)");

  std::map<int, std::string> rule_bodies;
  std::map<int, int> priorities;
  std::vector<int> order;

  std::istringstream is(payload);
  std::string line;
  while (std::getline(is, line)) {
    std::smatch m;
    if (std::regex_match(line, m, rule_re)) {
      int k = std::stoi(m[1]);
      if (!rule_bodies.count(k)) order.push_back(k);
      rule_bodies[k] = m[2];
    } else if (std::regex_match(line, m, prio_re)) {
      priorities[std::stoi(m[1])] = std::stoi(m[2]);
    }
  }
  if (rule_bodies.empty()) throw GrammarError("no 'Rule k:' lines found");

  Grammar g;
  for (size_t i = 0; i < order.size(); ++i) {
    int k = order[i];
    const std::string& body = rule_bodies[k];
    size_t arrow = body.find("->");
    if (arrow == std::string::npos)
      throw GrammarError("rule " + std::to_string(k) + ": missing '->'");
    auto prio = priorities.find(k);
    if (prio == priorities.end())
      throw GrammarError("rule " + std::to_string(k) + ": missing priority");
    GrammarRule r;
    r.lhs = parse_symbols(body.substr(0, arrow), k);
    r.rhs = parse_symbols(body.substr(arrow + 2), k);
    r.priority = prio->second;
    r.index = static_cast<int>(i);
    g.rules.push_back(std::move(r));
  }
  validate_grammar(g);
  return g;
}

std::string render_grammar(const Grammar& g) {
  auto render_side = [](const std::vector<GrammarSymbol>& syms) {
    std::string out;
    for (size_t i = 0; i < syms.size(); ++i) {
      if (i) out += ' ';
      if (syms[i].nonterminal) out += "##";
      out += syms[i].text;
    }
    return out;
  };
  std::string out;
  for (size_t i = 0; i < g.rules.size(); ++i) {
    const auto& r = g.rules[i];
    std::string k = std::to_string(i + 1);
    out += "Rule " + k + ": " + render_side(r.lhs) + " -> " + render_side(r.rhs) + "\n";
    out += "Priority " + k + ": " + std::to_string(r.priority) + "\n";
  }
  return out;
}

std::optional<TokenSeq> derive(const Grammar& g, const TokenSeq& input) {
  if (input.tokens.empty()) return std::nullopt;
  Deriver d(g, input.tokens);
  auto out = d.derive_span(0, static_cast<int>(input.tokens.size()), 0);
  if (!out) return std::nullopt;
  return TokenSeq{std::move(*out)};
}

std::vector<TokenSeq> enumerate_derivations(const Grammar& g, const TokenSeq& input, int limit) {
  std::vector<TokenSeq> out;
  if (input.tokens.empty() || limit < 1) return out;
  Enumerator e(g, input.tokens, limit);
  for (const auto& seq : e.enumerate_span(0, static_cast<int>(input.tokens.size()), 0))
    out.push_back(TokenSeq{seq});
  return out;
}

}  // namespace inductor
