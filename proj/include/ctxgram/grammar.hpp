#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctxgram/symbol.hpp"

namespace ctxgram {

/// Base-level errors in grammar construction (undeclared symbols, malformed
/// rules).
class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation is applied to a grammar outside its required form.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConjunctKind { Base, ProperContext, ExtendedContext };

/// One component of a rule body: `alpha`, `< beta` or `<= gamma`.
struct Conjunct {
  ConjunctKind kind = ConjunctKind::Base;
  std::vector<Symbol> body;  // empty = epsilon

  static Conjunct base(std::vector<Symbol> body) { return {ConjunctKind::Base, std::move(body)}; }
  static Conjunct proper(std::vector<Symbol> body) {
    return {ConjunctKind::ProperContext, std::move(body)};
  }
  static Conjunct extended(std::vector<Symbol> body) {
    return {ConjunctKind::ExtendedContext, std::move(body)};
  }

  friend bool operator==(const Conjunct&, const Conjunct&) = default;
  friend auto operator<=>(const Conjunct&, const Conjunct&) = default;
};

std::string render_conjunct(const Conjunct& c);

/// A rule `head -> c1 & ... & ck`. Conjuncts are kept sorted and unique.
class Rule {
 public:
  Rule(Nonterminal head, std::vector<Conjunct> conjuncts);

  const Nonterminal& head() const { return head_; }
  const std::vector<Conjunct>& conjuncts() const { return conjuncts_; }

  friend bool operator==(const Rule&, const Rule&) = default;
  friend auto operator<=>(const Rule&, const Rule&) = default;

 private:
  Nonterminal head_;
  std::vector<Conjunct> conjuncts_;
};

std::string render_rule(const Rule& r);

/// A grammar with left contexts. Immutable after construction.
class Grammar {
 public:
  /// Validates that the start symbol and every symbol used in a rule is
  /// declared. Duplicate rules are dropped, keeping the first occurrence.
  Grammar(std::set<char> alphabet, NonterminalSet nonterminals, std::vector<Rule> rules,
          Nonterminal start, bool accepts_epsilon = false);

  /// Declares exactly the nonterminals and terminals used by the rules (plus
  /// the start symbol and `extra_alphabet`).
  static Grammar from_rules(std::vector<Rule> rules, Nonterminal start,
                            bool accepts_epsilon = false, std::set<char> extra_alphabet = {});

  const std::set<char>& alphabet() const { return alphabet_; }
  const NonterminalSet& nonterminals() const { return nonterminals_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const Nonterminal& start() const { return start_; }
  bool accepts_epsilon() const { return accepts_epsilon_; }

  std::vector<const Rule*> rules_for(const Nonterminal& head) const;

  /// Equality up to rule order.
  friend bool operator==(const Grammar& a, const Grammar& b);

 private:
  std::set<char> alphabet_;
  NonterminalSet nonterminals_;
  std::vector<Rule> rules_;
  Nonterminal start_;
  bool accepts_epsilon_ = false;
};

struct Violation {
  Rule rule;
  std::string reason;
};

struct ValidationReport {
  bool passed = true;
  /// Even-odd form only: no even rules (S -> Aa, S -> e) present.
  bool strict = false;
  std::vector<Violation> violations;
  std::vector<std::string> notes;  // grammar-level problems not tied to a rule
};

/// Binary normal form shapes: A -> B1C1 & ... & BnCn, A -> a & <D, A -> a & <e.
ValidationReport validate_binary_nf(const Grammar& g);

/// Even-odd shapes: A -> B1a1C1 & ..., A -> a & <Db, A -> a & <e, S -> Aa,
/// S -> e (the flag); S must not occur in any body.
ValidationReport validate_even_odd_nf(const Grammar& g);

/// Removes nonterminals unreachable from the start symbol (through bodies of
/// all conjunct kinds) together with their rules.
Grammar reachable_trim(const Grammar& g);

/// Removes nonterminals that cannot derive anything (least fixpoint over all
/// conjunct kinds), every rule mentioning them, and then everything
/// unreachable from `roots` (the start symbol is always kept).
Grammar trim(const Grammar& g, const NonterminalSet& roots);

/// Nonterminals occurring in any conjunct body of the rule.
NonterminalSet referenced_nonterminals(const Rule& r);

}  // namespace ctxgram
