#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "inductor/qcfg.hpp"

using namespace inductor;

namespace {

TokenSeq toks(std::initializer_list<const char*> ts) {
  TokenSeq out;
  for (const char* t : ts) out.tokens.emplace_back(t);
  return out;
}

const char* kExampleGrammar =
    "Rule 1: lug -> BLUE\n"
    "Priority 1: 4\n"
    "Rule 2: dax -> RED\n"
    "Priority 2: 4\n"
    "Rule 3: ##A kiki ##B -> ##B ##A\n"
    "Priority 3: 2\n"
    "Rule 4: ##A fep -> ##A ##A ##A\n"
    "Priority 4: 3\n";

}  // namespace

TEST_CASE("grammar parsing") {
  Grammar g = parse_grammar(kExampleGrammar);
  REQUIRE(g.rules.size() == 4);
  CHECK(g.rules[0].lhs == std::vector<GrammarSymbol>{{false, "lug"}});
  CHECK(g.rules[0].rhs == std::vector<GrammarSymbol>{{false, "BLUE"}});
  CHECK(g.rules[0].priority == 4);
  CHECK(g.rules[2].lhs ==
        std::vector<GrammarSymbol>{{true, "A"}, {false, "kiki"}, {true, "B"}});
  CHECK(g.rules[2].priority == 2);
  CHECK(g.rules[3].index == 3);
}

TEST_CASE("single '#' prefix is accepted") {
  Grammar g = parse_grammar(
      "Rule 1: siun -> BLUE\nPriority 1: 2\n"
      "Rule 2: #A mcneilt -> #A #A #A\nPriority 2: 1\n");
  CHECK(g.rules[1].lhs[0].nonterminal);
  CHECK(g.rules[1].lhs[0].text == "A");
}

TEST_CASE("parsing tolerates prose around the rule block") {
  Grammar g = parse_grammar(
      "Here is my grammar.\n\nRule 1: dax -> RED\nPriority 1: 1\n\nHope that helps!");
  CHECK(g.rules.size() == 1);
}

TEST_CASE("validation failures") {
  CHECK_THROWS_AS(parse_grammar("no rules at all"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("Rule 1: dax -> RED\n"), GrammarError);  // missing priority
  CHECK_THROWS_AS(parse_grammar("Rule 1: dax RED\nPriority 1: 1\n"), GrammarError);
  CHECK_THROWS_AS(
      parse_grammar("Rule 1: ##A ##A -> ##A twice\nPriority 1: 1\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("Rule 1: ##A dax -> ##B\nPriority 1: 1\n"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("Rule 1: ##A -> ##A ##A\nPriority 1: 1\n"), GrammarError);
  // no all-terminal rule anywhere
  CHECK_THROWS_AS(parse_grammar("Rule 1: ##A fep -> ##A\nPriority 1: 1\n"), GrammarError);
}

TEST_CASE("render and parse round trip") {
  Grammar g = parse_grammar(kExampleGrammar);
  Grammar h = parse_grammar(render_grammar(g));
  REQUIRE(g.rules.size() == h.rules.size());
  for (size_t i = 0; i < g.rules.size(); ++i) {
    CHECK(g.rules[i].lhs == h.rules[i].lhs);
    CHECK(g.rules[i].rhs == h.rules[i].rhs);
    CHECK(g.rules[i].priority == h.rules[i].priority);
  }
}

TEST_CASE("derivations") {
  Grammar g = parse_grammar(kExampleGrammar);
  CHECK(derive(g, toks({"dax"})) == toks({"RED"}));
  CHECK(derive(g, toks({"lug", "fep"})) == toks({"BLUE", "BLUE", "BLUE"}));
  CHECK(derive(g, toks({"dax", "kiki", "lug"})) == toks({"BLUE", "RED"}));
  CHECK(derive(g, toks({"dax", "kiki", "lug", "fep"})) ==
        toks({"BLUE", "BLUE", "BLUE", "RED"}));
  CHECK_FALSE(derive(g, toks({"wif"})).has_value());
  CHECK_FALSE(derive(g, toks({"kiki"})).has_value());
  CHECK_FALSE(derive(g, TokenSeq{}).has_value());
}

TEST_CASE("lower priority binds outermost; ties break by source order") {
  Grammar g = parse_grammar(
      "Rule 1: a -> A\nPriority 1: 4\n"
      "Rule 2: b -> B\nPriority 2: 4\n"
      "Rule 3: ##A x ##B -> ##A ##B\nPriority 3: 1\n"
      "Rule 4: ##A x ##B -> ##B ##A\nPriority 4: 2\n");
  CHECK(derive(g, toks({"a", "x", "b"})) == toks({"A", "B"}));

  Grammar tie = parse_grammar(
      "Rule 1: a -> A\nPriority 1: 4\n"
      "Rule 2: b -> B\nPriority 2: 4\n"
      "Rule 3: ##A x ##B -> ##B ##A\nPriority 3: 1\n"
      "Rule 4: ##A x ##B -> ##A ##B\nPriority 4: 1\n");
  CHECK(derive(tie, toks({"a", "x", "b"})) == toks({"B", "A"}));
}

TEST_CASE("nonterminal spans are assigned shortest-first with backtracking") {
  // "a a x" forces A to absorb both leading tokens even though shorter
  // assignments are tried first.
  Grammar g = parse_grammar(
      "Rule 1: a a -> AA\nPriority 1: 4\n"
      "Rule 2: ##A x -> ##A\nPriority 2: 1\n");
  CHECK(derive(g, toks({"a", "a", "x"})) == toks({"AA"}));
}

TEST_CASE("depth cutoff turns very deep derivations into no-parse") {
  Grammar g = parse_grammar(
      "Rule 1: p -> P\nPriority 1: 4\n"
      "Rule 2: ##A f -> ##A\nPriority 2: 1\n");
  TokenSeq shallow{{"p"}};
  for (int i = 0; i < 20; ++i) shallow.tokens.push_back("f");
  CHECK(derive(g, shallow) == toks({"P"}));
  TokenSeq deep{{"p"}};
  for (int i = 0; i < 40; ++i) deep.tokens.push_back("f");
  CHECK_FALSE(derive(g, deep).has_value());
}

TEST_CASE("enumeration starts with the deterministic derivation") {
  Grammar g = parse_grammar(kExampleGrammar);
  auto all = enumerate_derivations(g, toks({"dax", "kiki", "lug", "fep"}), 10);
  REQUIRE_FALSE(all.empty());
  CHECK(all.front() == *derive(g, toks({"dax", "kiki", "lug", "fep"})));
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) CHECK_FALSE(all[i] == all[j]);
  CHECK(enumerate_derivations(g, toks({"wif"}), 10).empty());
}

TEST_CASE("random grammars: derive agrees with enumeration head") {
  std::mt19937 rng(99);
  const std::vector<std::string> prims = {"da", "lu", "wi", "zu"};
  const std::vector<std::string> outs = {"R", "B", "G", "Y"};
  for (int trial = 0; trial < 100; ++trial) {
    Grammar g;
    int index = 0;
    for (size_t i = 0; i < prims.size(); ++i)
      g.rules.push_back({{{false, prims[i]}}, {{false, outs[i]}}, 4, index++});
    // one or two random function rules
    int fns = 1 + static_cast<int>(rng() % 2);
    for (int f = 0; f < fns; ++f) {
      std::string word = "f" + std::to_string(f);
      if (rng() % 2) {
        std::vector<GrammarSymbol> rhs;
        for (unsigned k = 1 + rng() % 3; k; --k) rhs.push_back({true, "A"});
        g.rules.push_back({{{true, "A"}, {false, word}}, rhs, 2 + static_cast<int>(rng() % 2),
                           index++});
      } else {
        std::vector<GrammarSymbol> rhs = {{true, "B"}, {true, "A"}};
        if (rng() % 2) rhs.push_back({true, "B"});
        g.rules.push_back(
            {{{true, "A"}, {false, word}, {true, "B"}}, rhs, 1 + static_cast<int>(rng() % 3),
             index++});
      }
    }
    validate_grammar(g);

    TokenSeq input;
    input.tokens.push_back(prims[rng() % prims.size()]);
    for (unsigned k = rng() % 4; k; --k) {
      if (rng() % 2) {
        input.tokens.push_back("f" + std::to_string(rng() % static_cast<unsigned>(fns)));
        if (rng() % 2) input.tokens.push_back(prims[rng() % prims.size()]);
      } else {
        input.tokens.push_back(prims[rng() % prims.size()]);
      }
    }
    auto first = derive(g, input);
    auto all = enumerate_derivations(g, input, 5);
    if (first) {
      REQUIRE_FALSE(all.empty());
      CHECK(all.front() == *first);
    } else {
      CHECK(all.empty());
    }
  }
}
