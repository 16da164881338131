#include "ctxgram/grammar.hpp"

#include <algorithm>
#include <map>

namespace ctxgram {

std::string render_conjunct(const Conjunct& c) {
  std::string out;
  if (c.kind == ConjunctKind::ProperContext) out = "< ";
  if (c.kind == ConjunctKind::ExtendedContext) out = "<= ";
  if (c.body.empty()) return out + "_";
  for (size_t i = 0; i < c.body.size(); ++i) {
    if (i) out += ' ';
    out += render_symbol(c.body[i]);
  }
  return out;
}

Rule::Rule(Nonterminal head, std::vector<Conjunct> conjuncts)
    : head_(std::move(head)), conjuncts_(std::move(conjuncts)) {
  std::sort(conjuncts_.begin(), conjuncts_.end());
  conjuncts_.erase(std::unique(conjuncts_.begin(), conjuncts_.end()), conjuncts_.end());
  bool has_base = std::any_of(conjuncts_.begin(), conjuncts_.end(),
                              [](const Conjunct& c) { return c.kind == ConjunctKind::Base; });
  if (!has_base) throw GrammarError("rule for " + head_.name() + " has no base conjunct");
}

std::string render_rule(const Rule& r) {
  std::string out = r.head().name() + " ->";
  for (size_t i = 0; i < r.conjuncts().size(); ++i) {
    out += i ? " & " : " ";
    out += render_conjunct(r.conjuncts()[i]);
  }
  return out;
}

NonterminalSet referenced_nonterminals(const Rule& r) {
  NonterminalSet out;
  for (const auto& c : r.conjuncts())
    for (const auto& s : c.body)
      if (is_nonterminal(s)) out.insert(nonterminal_of(s));
  return out;
}

Grammar::Grammar(std::set<char> alphabet, NonterminalSet nonterminals, std::vector<Rule> rules,
                 Nonterminal start, bool accepts_epsilon)
    : alphabet_(std::move(alphabet)),
      nonterminals_(std::move(nonterminals)),
      start_(std::move(start)),
      accepts_epsilon_(accepts_epsilon) {
  for (char c : alphabet_)
    if (!is_terminal_char(c)) throw GrammarError(std::string("invalid terminal '") + c + "'");
  if (!nonterminals_.count(start_))
    throw GrammarError("start symbol " + start_.name() + " is not declared");
  std::set<Rule> seen;
  rules_.reserve(rules.size());
  for (auto& r : rules) {
    if (!nonterminals_.count(r.head()))
      throw GrammarError("undeclared nonterminal " + r.head().name());
    for (const auto& c : r.conjuncts())
      for (const auto& s : c.body) {
        if (is_terminal(s) && !alphabet_.count(terminal_of(s)))
          throw GrammarError(std::string("undeclared terminal '") + terminal_of(s) + "' in " +
                             render_rule(r));
        if (is_nonterminal(s) && !nonterminals_.count(nonterminal_of(s)))
          throw GrammarError("undeclared nonterminal " + nonterminal_of(s).name() + " in " +
                             render_rule(r));
      }
    if (seen.insert(r).second) rules_.push_back(std::move(r));
  }
}

Grammar Grammar::from_rules(std::vector<Rule> rules, Nonterminal start, bool accepts_epsilon,
                            std::set<char> extra_alphabet) {
  NonterminalSet nts{start};
  std::set<char> alphabet = std::move(extra_alphabet);
  for (const auto& r : rules) {
    nts.insert(r.head());
    for (const auto& c : r.conjuncts())
      for (const auto& s : c.body) {
        if (is_terminal(s))
          alphabet.insert(terminal_of(s));
        else
          nts.insert(nonterminal_of(s));
      }
  }
  return Grammar(std::move(alphabet), std::move(nts), std::move(rules), std::move(start),
                 accepts_epsilon);
}

std::vector<const Rule*> Grammar::rules_for(const Nonterminal& head) const {
  std::vector<const Rule*> out;
  for (const auto& r : rules_)
    if (r.head() == head) out.push_back(&r);
  return out;
}

bool operator==(const Grammar& a, const Grammar& b) {
  if (a.alphabet_ != b.alphabet_ || a.nonterminals_ != b.nonterminals_ || a.start_ != b.start_ ||
      a.accepts_epsilon_ != b.accepts_epsilon_)
    return false;
  std::multiset<Rule> ra(a.rules_.begin(), a.rules_.end());
  std::multiset<Rule> rb(b.rules_.begin(), b.rules_.end());
  return ra == rb;
}

namespace {

bool is_nt_body(const std::vector<Symbol>& body, size_t n) {
  return body.size() == n &&
         std::all_of(body.begin(), body.end(), [](const Symbol& s) { return is_nonterminal(s); });
}

bool is_single_terminal(const Conjunct& c) {
  return c.kind == ConjunctKind::Base && c.body.size() == 1 && is_terminal(c.body[0]);
}

// a & <X where X is accepted by `context_ok`.
template <class Pred>
bool is_terminal_with_context(const Rule& r, Pred context_ok) {
  const auto& cs = r.conjuncts();
  if (cs.size() != 2) return false;
  // Sorted order puts the Base conjunct first.
  return is_single_terminal(cs[0]) && cs[1].kind == ConjunctKind::ProperContext &&
         context_ok(cs[1].body);
}

}  // namespace

ValidationReport validate_binary_nf(const Grammar& g) {
  ValidationReport rep;
  for (const auto& r : g.rules()) {
    bool concat = std::all_of(r.conjuncts().begin(), r.conjuncts().end(), [](const Conjunct& c) {
      return c.kind == ConjunctKind::Base && is_nt_body(c.body, 2);
    });
    bool terminal = is_terminal_with_context(r, [](const std::vector<Symbol>& b) {
      return b.empty() || is_nt_body(b, 1);
    });
    if (concat || terminal) continue;
    std::string reason;
    bool has_terminal = false, has_context = false;
    for (const auto& c : r.conjuncts()) {
      if (c.kind != ConjunctKind::Base) has_context = true;
      for (const auto& s : c.body)
        if (is_terminal(s)) has_terminal = true;
    }
    if (r.conjuncts().size() == 1 && is_single_terminal(r.conjuncts()[0]))
      reason = "terminal rule without context conjunct";
    else if (has_terminal && !has_context)
      reason = "terminal inside concatenation";
    else
      reason = "not of the form B1C1 & ... & BnCn, a & <D or a & <e";
    rep.violations.push_back({r, reason});
  }
  rep.passed = rep.violations.empty();
  return rep;
}

ValidationReport validate_even_odd_nf(const Grammar& g) {
  ValidationReport rep;
  const Nonterminal& s = g.start();
  bool even_rules = g.accepts_epsilon();
  for (const auto& r : g.rules()) {
    if (referenced_nonterminals(r).count(s))
      rep.violations.push_back({r, "start symbol occurs on a right-hand side"});
    const auto& cs = r.conjuncts();
    bool concat = std::all_of(cs.begin(), cs.end(), [](const Conjunct& c) {
      return c.kind == ConjunctKind::Base && c.body.size() == 3 && is_nonterminal(c.body[0]) &&
             is_terminal(c.body[1]) && is_nonterminal(c.body[2]);
    });
    bool terminal = is_terminal_with_context(r, [](const std::vector<Symbol>& b) {
      return b.empty() || (b.size() == 2 && is_nonterminal(b[0]) && is_terminal(b[1]));
    });
    bool even = r.head() == s && cs.size() == 1 && cs[0].kind == ConjunctKind::Base &&
                cs[0].body.size() == 2 && is_nonterminal(cs[0].body[0]) &&
                is_terminal(cs[0].body[1]);
    if (even) even_rules = true;
    if (!(concat || terminal || even))
      rep.violations.push_back({r, "not an even-odd normal form rule"});
  }
  rep.passed = rep.violations.empty();
  rep.strict = rep.passed && !even_rules;
  return rep;
}

Grammar trim(const Grammar& g, const NonterminalSet& roots) {
  // Productive nonterminals: least fixpoint over rules whose every referenced
  // nonterminal is productive.
  NonterminalSet productive;
  std::vector<NonterminalSet> refs;
  refs.reserve(g.rules().size());
  for (const auto& r : g.rules()) refs.push_back(referenced_nonterminals(r));
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t k = 0; k < g.rules().size(); ++k) {
      const auto& head = g.rules()[k].head();
      if (productive.count(head)) continue;
      if (std::all_of(refs[k].begin(), refs[k].end(),
                      [&](const Nonterminal& n) { return productive.count(n) > 0; })) {
        productive.insert(head);
        changed = true;
      }
    }
  }
  std::map<Nonterminal, std::vector<size_t>> by_head;
  for (size_t k = 0; k < g.rules().size(); ++k) {
    if (!productive.count(g.rules()[k].head())) continue;
    if (std::all_of(refs[k].begin(), refs[k].end(),
                    [&](const Nonterminal& n) { return productive.count(n) > 0; }))
      by_head[g.rules()[k].head()].push_back(k);
  }
  NonterminalSet reach{g.start()};
  std::vector<Nonterminal> stack{g.start()};
  for (const auto& r : roots)
    if (g.nonterminals().count(r) && reach.insert(r).second) stack.push_back(r);
  while (!stack.empty()) {
    Nonterminal n = stack.back();
    stack.pop_back();
    auto it = by_head.find(n);
    if (it == by_head.end()) continue;
    for (size_t k : it->second)
      for (const auto& m : refs[k])
        if (reach.insert(m).second) stack.push_back(m);
  }
  std::vector<Rule> rules;
  for (size_t k = 0; k < g.rules().size(); ++k) {
    const auto& head = g.rules()[k].head();
    if (!reach.count(head)) continue;
    auto it = by_head.find(head);
    if (it != by_head.end() && std::binary_search(it->second.begin(), it->second.end(), k))
      rules.push_back(g.rules()[k]);
  }
  return Grammar(g.alphabet(), std::move(reach), std::move(rules), g.start(),
                 g.accepts_epsilon());
}

Grammar reachable_trim(const Grammar& g) {
  NonterminalSet reach{g.start()};
  std::vector<Nonterminal> stack{g.start()};
  while (!stack.empty()) {
    Nonterminal n = stack.back();
    stack.pop_back();
    for (const Rule* r : g.rules_for(n))
      for (const auto& m : referenced_nonterminals(*r))
        if (reach.insert(m).second) stack.push_back(m);
  }
  std::vector<Rule> rules;
  for (const auto& r : g.rules())
    if (reach.count(r.head())) rules.push_back(r);
  return Grammar(g.alphabet(), std::move(reach), std::move(rules), g.start(),
                 g.accepts_epsilon());
}

}  // namespace ctxgram
