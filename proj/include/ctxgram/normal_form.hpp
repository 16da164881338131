#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ctxgram/grammar.hpp"

namespace ctxgram {

/// Guards the exponential stages.
struct Budget {
  size_t max_nonterminals = 20000;
  std::optional<double> time_limit_seconds;
};

class BudgetExceeded : public GrammarError {
 public:
  using GrammarError::GrammarError;
};

/// Triples [x|A|y]: [x|A|y] defines ux<v> whenever u<xvy> is in L(A) and
/// |ux| is even, |v| odd. Start [e|S|e]. Requires binary normal form.
Grammar oddify(const Grammar& g);

/// Removes unit conjuncts and contradictory rules without changing the
/// language of any nonterminal. Output rules are
///   A -> a & <e
///   A -> a & <D1 b & ... & <Dl b & <=E1 & ... & <=Em          (l >= 1)
///   A -> B1 a1 C1 & ... & Bk ak Ck & <D1 b & ... & <=Em       (k >= 1)
Grammar cleanup(const Grammar& g);

/// Removes extended contexts. The result is in strict even-odd form, and
/// e<v> is in L(~A) iff it is in L(A) for every nonterminal A of g, where
/// ~A = tilde(A). The start symbol is ~S, or a fresh copy of it when ~S
/// occurs in some body.
Grammar deextend(const Grammar& g, const Budget& budget = {});

/// Merges several proper contexts of one rule into a single context over a
/// powerset nonterminal {Q1,...,Qn} defining the intersection of its members.
/// Rules may only use base conjuncts `a` and `B a C` and contexts `<e` and
/// `<Q b`.
Grammar powerset_merge(const Grammar& g, const Budget& budget = {});

/// oddify, cleanup, deextend, then a fresh start symbol S' with
///   S' -> Phi       for every rule ~[e|S|e] -> Phi
///   S' -> ~[e|S|a] a
/// and the epsilon flag passed through.
Grammar to_even_odd_nf(const Grammar& g, const Budget& budget = {});

/// The alias ~A = {[{e}|A|{}]}.
Nonterminal tilde(const Nonterminal& a);

struct ParityViolation {
  Nonterminal symbol;
  size_t i = 0;
  size_t j = 0;
};

/// Chart items (A, i, j) of non-start nonterminals with i odd or j - i even.
std::vector<ParityViolation> parity_audit(const Grammar& g, std::string_view w);

}  // namespace ctxgram
