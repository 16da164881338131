#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctxgram/recognizer.hpp"
#include "ctxgram/text.hpp"

using namespace ctxgram;

namespace {
Nonterminal N(const char* s) { return Nonterminal::plain(s); }
}  // namespace

TEST_CASE("parse single rule with empty proper context") {
  auto g = parse_grammar_text("S -> a & < _");
  REQUIRE(g.rules().size() == 1);
  const auto& r = g.rules()[0];
  CHECK(r.head() == N("S"));
  REQUIRE(r.conjuncts().size() == 2);
  CHECK(r.conjuncts()[0] == Conjunct::base({Terminal{'a'}}));
  CHECK(r.conjuncts()[1] == Conjunct::proper({}));
  CHECK(g.start() == N("S"));
  CHECK(!g.accepts_epsilon());
}

TEST_CASE("parse three-rule sample") {
  auto g = parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & < A");
  CHECK(g.rules().size() == 3);
  CHECK(g.start() == N("S"));
  CHECK(g.nonterminals() == NonterminalSet{N("S"), N("A"), N("B")});
  CHECK(g.alphabet() == std::set<char>{'a', 'b'});
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_grammar_text("S -> < A"), SyntaxError);
  CHECK_THROWS_AS(parse_grammar_text("S -> A"), SyntaxError);  // undeclared
  CHECK_THROWS_AS(parse_grammar_text("S a"), SyntaxError);
  CHECK_THROWS_AS(parse_grammar_text("S -> a a%"), SyntaxError);
  try {
    parse_grammar_text("S -> a\n\nT -> < b");
    FAIL("expected error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("alternatives, comments and epsilon flag") {
  auto g = parse_grammar_text("// header\nS -> a & < _ | _ | A B  // trailing\nA -> a & < _\nB -> b & <= A b\n");
  CHECK(g.accepts_epsilon());
  CHECK(g.rules().size() == 4);
  CHECK(g.rules_for(N("S")).size() == 2);
}

TEST_CASE("render canonical text") {
  auto g = parse_grammar_text("S -> a & < _");
  CHECK(render_grammar_text(g) == "S -> a & < _\n");
  auto t = Nonterminal::triple(std::nullopt, N("S"), 'b');
  auto g2 = Grammar::from_rules({Rule(t, {Conjunct::base({Terminal{'a'}}), Conjunct::proper({})})}, t, false);
  CHECK(render_grammar_text(g2) == "[e|S|b] -> a & < _\n");
  CHECK(parse_grammar_text(render_grammar_text(g2)) == g2);
}

TEST_CASE("empty rule set keeps the start declared") {
  Grammar g({'a'}, {N("S")}, {}, N("S"), false);
  auto text = render_grammar_text(g);
  CHECK(text == "%start S\n%alphabet a\n");
  CHECK(parse_grammar_text(text) == g);
}

TEST_CASE("round trip") {
  const char* texts[] = {
      "S -> A B\nA -> a & < _\nB -> b & < A\n",
      "S -> _\nS -> A B & B A\nA -> a & < _ | a & < B\nB -> b & < A\n",
      "%start T\n%alphabet a b c\n%nonterminals X\nS -> a & <= T\nT -> S S\n",
      "S -> [e|S|a] a [b|A|e] & {A,[e|B|e]} # A\n[e|S|a] -> a & < _\n[b|A|e] -> b & < [e|S|a] b\n"
      "{A,[e|B|e]} -> a & < _\nA -> a & < _\n",
  };
  for (const char* t : texts) {
    INFO(t);
    auto g = parse_grammar_text(t);
    auto again = parse_grammar_text(render_grammar_text(g));
    CHECK(again == g);
    CHECK(render_grammar_text(again) == render_grammar_text(g));
  }
}

TEST_CASE("rules dedup conjuncts and require a base conjunct") {
  Rule r(N("A"), {Conjunct::proper({}), Conjunct::base({Terminal{'a'}}), Conjunct::proper({})});
  CHECK(r.conjuncts().size() == 2);
  CHECK_THROWS_AS(Rule(N("A"), {Conjunct::proper({})}), GrammarError);
}

TEST_CASE("grammar rejects undeclared symbols") {
  CHECK_THROWS_AS(Grammar({'a'}, {N("S")}, {Rule(N("S"), {Conjunct::base({N("A")})})}, N("S"), false),
                  GrammarError);
  CHECK_THROWS_AS(Grammar({'a'}, {N("S")}, {Rule(N("S"), {Conjunct::base({Terminal{'b'}})})}, N("S"), false),
                  GrammarError);
  CHECK_THROWS_AS(Grammar({'a'}, {N("A")}, {}, N("S"), false), GrammarError);
}

TEST_CASE("binary normal form validator") {
  CHECK(validate_binary_nf(parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & < A")).passed);
  auto r1 = validate_binary_nf(parse_grammar_text("S -> a B\nB -> b & < _"));
  CHECK(!r1.passed);
  REQUIRE(r1.violations.size() == 1);
  CHECK(r1.violations[0].reason == "terminal inside concatenation");
  auto r2 = validate_binary_nf(parse_grammar_text("S -> a"));
  CHECK(!r2.passed);
  CHECK(r2.violations[0].reason == "terminal rule without context conjunct");
  CHECK(!validate_binary_nf(parse_grammar_text("S -> A B & <= A\nA -> a & < _\nB -> b & < _")).passed);
  CHECK(!validate_binary_nf(parse_grammar_text("S -> a & < A B\nA -> a & < _\nB -> b & < _")).passed);
  // validators are pure
  auto g = parse_grammar_text("S -> a B\nB -> b & < _");
  auto a = validate_binary_nf(g), b = validate_binary_nf(g);
  CHECK(a.violations.size() == b.violations.size());
}

TEST_CASE("even-odd normal form validator") {
  auto ok = parse_grammar_text("S -> A a B & A b B\nS -> A a\nA -> a & < _\nB -> b & < A a");
  auto rep = validate_even_odd_nf(ok);
  CHECK(rep.passed);
  CHECK(!rep.strict);
  auto strict = parse_grammar_text("S -> A a B\nA -> a & < _\nB -> b & < A a");
  CHECK(validate_even_odd_nf(strict).strict);
  CHECK(!validate_even_odd_nf(parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & < _")).passed);
  auto rec = validate_even_odd_nf(parse_grammar_text("S -> A a S\nA -> a & < _"));
  CHECK(!rec.passed);
  CHECK(rec.violations[0].reason == "start symbol occurs on a right-hand side");
  auto eps = parse_grammar_text("S -> _\nS -> A a B\nA -> a & < _\nB -> b & < A a");
  CHECK(validate_even_odd_nf(eps).passed);
  CHECK(!validate_even_odd_nf(eps).strict);
}

TEST_CASE("reachable trim") {
  auto g = parse_grammar_text("S -> A B\nA -> a & < _\nB -> b & < A\nX -> a & < _");
  auto t = reachable_trim(g);
  CHECK(!t.nonterminals().count(N("X")));
  CHECK(t.rules().size() == 3);
  CHECK(reachable_trim(t) == t);
  auto ctx = parse_grammar_text("S -> A A\nA -> a & < X\nX -> b & < _");
  CHECK(reachable_trim(ctx).nonterminals().count(N("X")));
  for (size_t n = 0; n <= 6; ++n) CHECK(enumerate_language(g, n) == enumerate_language(t, n));
}
