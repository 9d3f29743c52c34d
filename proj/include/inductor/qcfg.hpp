#pragma once

#include <optional>
#include <string>
#include <vector>

#include "inductor/value.hpp"

namespace inductor {

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GrammarSymbol {
  bool nonterminal = false;
  std::string text;  // terminal token, or nonterminal identifier without "##"
  bool operator==(const GrammarSymbol&) const = default;
};

struct GrammarRule {
  std::vector<GrammarSymbol> lhs;
  std::vector<GrammarSymbol> rhs;
  int priority = 0;
  int index = 0;  // source order
};

struct Grammar {
  std::vector<GrammarRule> rules;
  int max_depth = 30;
};

// Parses "Rule k: <lhs> -> <rhs>" / "Priority k: <int>" line pairs. Accepts
// both "##" and "#" nonterminal prefixes and canonicalizes to "##". Throws
// GrammarError on format problems or validation failures (repeated lhs
// nonterminal, lhs/rhs nonterminal set mismatch, no terminal on lhs, no
// all-terminal rule in the grammar).
Grammar parse_grammar(const std::string& payload);

// Validation shared by parse_grammar and programmatic construction.
void validate_grammar(const Grammar& g);

std::string render_grammar(const Grammar& g);

// Deterministic derivation. At each span, rules are attempted in ascending
// priority (lowest priority binds outermost), ties by source index;
// nonterminal spans are assigned greedily left-to-right shortest-first.
// Returns nullopt when no derivation exists within max_depth.
std::optional<TokenSeq> derive(const Grammar& g, const TokenSeq& input);

// All distinct derivation outputs up to limit, in the deterministic search
// order; the first element always equals derive()'s result when a parse exists.
std::vector<TokenSeq> enumerate_derivations(const Grammar& g, const TokenSeq& input, int limit);

}  // namespace inductor
