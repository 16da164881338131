#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ctxgram/recognizer.hpp"
#include "ctxgram/text.hpp"
#include "random_grammar.hpp"

using namespace ctxgram;

namespace {
Nonterminal N(const char* s) { return Nonterminal::plain(s); }
const char* kSample = "S -> A B\nA -> a & < _\nB -> b & < A";
}  // namespace

TEST_CASE("single terminal in empty context") {
  auto g = parse_grammar_text("S -> a & < _");
  auto c = derive_chart(g, "a");
  CHECK(c.contains(N("S"), 0, 1));
  CHECK(c.contains(Symbol{Terminal{'a'}}, 0, 1));
  CHECK(recognize(g, "a"));
  CHECK(!recognize(g, ""));
  CHECK(!recognize(g, "aa"));
  CHECK(enumerate_language(g, 2) == std::set<std::string>{"a"});
}

TEST_CASE("three-rule sample") {
  auto g = parse_grammar_text(kSample);
  CHECK(derive_chart(g, "ab").contains(N("S"), 0, 2));
  CHECK(!derive_chart(g, "ba").contains(N("S"), 0, 2));
  CHECK(recognize(g, "ab"));
  CHECK(!recognize(g, "aa"));
  CHECK(enumerate_language(g, 3) == std::set<std::string>{"ab"});
  auto c = derive_chart(g, "ab");
  CHECK(c.spans(N("A")) == std::vector<std::pair<size_t, size_t>>{{0, 1}});
  CHECK(c.spans(N("B")) == std::vector<std::pair<size_t, size_t>>{{1, 2}});
  CHECK(c.size() == 5);
}

TEST_CASE("circular extended context stays empty") {
  auto g = parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & <= S");
  CHECK(!derive_chart(g, "ab").contains(N("S"), 0, 2));
  CHECK(!recognize(g, "ab"));
  CHECK(!recognize_topdown(g, "ab"));
}

TEST_CASE("top-down oracle agrees on the examples") {
  auto g1 = parse_grammar_text("%alphabet a b\nS -> a & < _");
  auto g2 = parse_grammar_text(kSample);
  for (std::string w : {"", "a", "b", "ab", "ba", "aa", "abb"}) {
    INFO(w);
    CHECK(recognize_topdown(g1, w) == recognize(g1, w));
    CHECK(recognize_topdown(g2, w) == recognize(g2, w));
  }
}

TEST_CASE("epsilon flag") {
  auto g = parse_grammar_text("S -> _\nS -> a & < _");
  CHECK(recognize(g, ""));
  CHECK(recognize_topdown(g, ""));
  CHECK(enumerate_language(g, 0) == std::set<std::string>{""});
  CHECK(enumerate_language(g, 1) == std::set<std::string>{"", "a"});
}

TEST_CASE("empty bodies in contexts") {
  // B -> b & <= A: A must cover the whole prefix including b... A -> _ only in base
  auto g = parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & <= A B");
  CHECK(recognize(g, "ab") == recognize_topdown(g, "ab"));
  // nullable nonterminal in the middle of a body
  auto n = parse_grammar_text("S -> A E B\nE -> _\nA -> a & < _\nB -> b & < A E");
  CHECK(recognize(n, "ab"));
  CHECK(recognize_topdown(n, "ab"));
  CHECK(!recognize(n, "a"));
}

TEST_CASE("symbol outside the alphabet") {
  auto g = parse_grammar_text("S -> a & < _");
  CHECK_THROWS_AS(derive_chart(g, "b"), InputError);
  CHECK_THROWS_AS(recognize_topdown(g, "b"), InputError);
}

TEST_CASE("axiom completeness") {
  auto g = parse_grammar_text(kSample);
  std::string w = "abbab";
  auto c = derive_chart(g, w);
  for (size_t i = 0; i < w.size(); ++i)
    for (char t : {'a', 'b'}) CHECK(c.contains(Symbol{Terminal{t}}, i, i + 1) == (w[i] == t));
  for (const auto& it : c.items())
    if (is_terminal(it.symbol)) CHECK(it.j == it.i + 1);
}

TEST_CASE("fixpoint determinism across schedules and orders") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 60; ++round) {
    auto g = testing_support::random_grammar(rng, 3, 2);
    auto w = testing_support::random_string(rng, g, 5);
    auto base = derive_chart(g, w);
    for (uint64_t seed = 1; seed <= 3; ++seed) {
      CHECK(derive_chart(g, w, {Schedule::ByEnd, seed}) == base);
      CHECK(derive_chart(g, w, {Schedule::Global, seed}) == base);
    }
    CHECK(derive_chart(g, w, {Schedule::Global, std::nullopt}) == base);
  }
}

TEST_CASE("monotonicity under added rules") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 40; ++round) {
    auto g = testing_support::random_grammar(rng, 3, 2);
    auto extra = testing_support::random_grammar(rng, 3, 2);
    std::vector<Rule> rules = g.rules();
    rules.insert(rules.end(), extra.rules().begin(), extra.rules().end());
    auto bigger = Grammar::from_rules(rules, g.start(), g.accepts_epsilon(), g.alphabet());
    auto w = testing_support::random_string(rng, g, 5);
    auto small = derive_chart(g, w).items();
    auto large = derive_chart(bigger, w);
    for (const auto& it : small) CHECK(large.contains(it.symbol, it.i, it.j));
  }
}

TEST_CASE("strategy agreement on random grammars") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 200; ++round) {
    auto g = testing_support::random_grammar(rng, 3, 2);
    auto w = testing_support::random_string(rng, g, 5);
    INFO(render_grammar_text(g), "w=", w);
    CHECK(recognize(g, w) == recognize_topdown(g, w));
  }
}

TEST_CASE("enumeration matches per-string recognition") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    auto g = testing_support::random_grammar(rng, 3, 2);
    auto lang = enumerate_language(g, 4);
    Recognizer r(g);
    size_t visited = 0;
    r.for_each_string(4, [&](const std::string& w, const Chart& c) {
      ++visited;
      bool in = (w.empty() && g.accepts_epsilon()) || c.contains(g.start(), 0, w.size());
      CHECK(in == (lang.count(w) > 0));
      CHECK(c == derive_chart(g, w));
    });
    size_t expected = 0, pow = 1;
    for (int k = 0; k <= 4; ++k, pow *= g.alphabet().size()) expected += pow;
    CHECK(visited == expected);
  }
}

TEST_CASE("long inputs") {
  auto g = parse_grammar_text("S -> A B\nA -> A A | a & < _ | a & < A\nB -> B B | b & < A | b & < A B");
  std::string w(300, 'a');
  w += std::string(300, 'b');
  CHECK(recognize(g, w));
  CHECK(!recognize(g, "b" + w));
}
