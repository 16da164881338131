#include "ctxgram/normal_form.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "ctxgram/recognizer.hpp"

namespace ctxgram {

namespace {

using Body = std::set<Conjunct>;

class Limits {
 public:
  explicit Limits(const Budget& b) : budget_(b), begin_(std::chrono::steady_clock::now()) {}

  void check_size(size_t nonterminals, const char* stage) const {
    if (nonterminals > budget_.max_nonterminals)
      throw BudgetExceeded(std::string(stage) + ": more than " +
                           std::to_string(budget_.max_nonterminals) + " nonterminals");
    check_time(stage);
  }
  void check_time(const char* stage) const {
    if (!budget_.time_limit_seconds) return;
    std::chrono::duration<double> spent = std::chrono::steady_clock::now() - begin_;
    if (spent.count() > *budget_.time_limit_seconds)
      throw BudgetExceeded(std::string(stage) + ": time limit exceeded");
  }

 private:
  Budget budget_;
  std::chrono::steady_clock::time_point begin_;
};

Symbol T(char c) { return Terminal{c}; }

std::optional<char> solitary_terminal(const Conjunct& c) {
  if (c.kind == ConjunctKind::Base && c.body.size() == 1 && is_terminal(c.body[0]))
    return terminal_of(c.body[0]);
  return std::nullopt;
}

bool is_unit(const Conjunct& c) {
  return c.kind == ConjunctKind::Base && c.body.size() == 1 && is_nonterminal(c.body[0]);
}

bool is_nan(const std::vector<Symbol>& b) {
  return b.size() == 3 && is_nonterminal(b[0]) && is_terminal(b[1]) && is_nonterminal(b[2]);
}

bool is_na(const std::vector<Symbol>& b) {
  return b.size() == 2 && is_nonterminal(b[0]) && is_terminal(b[1]);
}

bool is_empty_context(const Conjunct& c) {
  return c.kind == ConjunctKind::ProperContext && c.body.empty();
}

// Contradictory conjunct combinations: a with BaC, <e with <Db, distinct
// solitary terminals, <Xa with <Yb.
bool contradictory(const Body& body) {
  std::optional<char> solitary, last;
  bool concat = false, empty_ctx = false, nonempty_ctx = false;
  for (const auto& c : body) {
    if (auto a = solitary_terminal(c)) {
      if (solitary && *solitary != *a) return true;
      solitary = a;
    } else if (c.kind == ConjunctKind::Base && c.body.size() == 3) {
      concat = true;
    } else if (c.kind == ConjunctKind::ProperContext) {
      if (c.body.empty()) {
        empty_ctx = true;
      } else {
        nonempty_ctx = true;
        char b = terminal_of(c.body.back());
        if (last && *last != b) return true;
        last = b;
      }
    }
  }
  return (solitary && concat) || (empty_ctx && nonempty_ctx);
}

// A rule whose conjuncts include all conjuncts of another rule for the same
// head adds nothing.
std::vector<Rule> drop_subsumed(std::vector<Rule> rules) {
  std::sort(rules.begin(), rules.end());
  std::vector<Rule> out;
  for (size_t lo = 0; lo < rules.size();) {
    size_t hi = lo;
    while (hi < rules.size() && rules[hi].head() == rules[lo].head()) ++hi;
    std::vector<const Rule*> group;
    for (size_t k = lo; k < hi; ++k) group.push_back(&rules[k]);
    std::stable_sort(group.begin(), group.end(), [](const Rule* a, const Rule* b) {
      return a->conjuncts().size() < b->conjuncts().size();
    });
    std::vector<const Rule*> kept;
    for (const Rule* r : group) {
      bool covered = std::any_of(kept.begin(), kept.end(), [&](const Rule* k) {
        return std::includes(r->conjuncts().begin(), r->conjuncts().end(), k->conjuncts().begin(),
                             k->conjuncts().end());
      });
      if (!covered) kept.push_back(r);
    }
    for (const Rule* r : kept) out.push_back(*r);
    lo = hi;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Nonterminals whose rules coincide once every nonterminal is replaced by its
// class define the same language. Coarsest such partition by refinement; each
// class is renamed to its smallest member. The start symbol stays alone.
Grammar merge_equivalent(const Grammar& g) {
  std::map<Nonterminal, int> block;
  for (const auto& n : g.nonterminals()) block[n] = n == g.start() ? 1 : 0;
  for (;;) {
    std::map<std::pair<int, std::set<std::vector<std::pair<int, std::vector<long>>>>>, int> sigs;
    std::map<Nonterminal, int> next;
    for (const auto& n : g.nonterminals()) {
      std::set<std::vector<std::pair<int, std::vector<long>>>> rules;
      for (const Rule* r : g.rules_for(n)) {
        std::vector<std::pair<int, std::vector<long>>> cs;
        for (const auto& c : r->conjuncts()) {
          std::vector<long> body;
          for (const auto& x : c.body)
            body.push_back(is_terminal(x) ? -1 - static_cast<long>(terminal_of(x)) : block.at(nonterminal_of(x)));
          cs.emplace_back(static_cast<int>(c.kind), std::move(body));
        }
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
        rules.insert(std::move(cs));
      }
      auto key = std::make_pair(block.at(n), std::move(rules));
      auto it = sigs.emplace(std::move(key), static_cast<int>(sigs.size())).first;
      next[n] = it->second;
    }
    size_t before = std::set<int>([&] { std::set<int> b; for (auto& [n, k] : block) b.insert(k); return b; }()).size();
    block = std::move(next);
    if (sigs.size() == before) break;
  }
  std::map<int, Nonterminal> rep;
  for (const auto& [n, k] : block) rep.emplace(k, n);  // nonterminals iterate in order
  auto map_symbol = [&](const Symbol& x) -> Symbol {
    return is_terminal(x) ? x : Symbol{rep.at(block.at(nonterminal_of(x)))};
  };
  std::vector<Rule> rules;
  NonterminalSet nts;
  for (const auto& r : g.rules()) {
    if (!(rep.at(block.at(r.head())) == r.head())) continue;
    std::vector<Conjunct> cs;
    for (const auto& c : r.conjuncts()) {
      Conjunct d{c.kind, {}};
      for (const auto& x : c.body) d.body.push_back(map_symbol(x));
      cs.push_back(std::move(d));
    }
    rules.emplace_back(r.head(), std::move(cs));
  }
  for (const auto& [k, n] : rep) nts.insert(n);
  return Grammar(g.alphabet(), std::move(nts), std::move(rules), g.start(), g.accepts_epsilon());
}

Rule make_rule(const Nonterminal& head, const Body& body) {
  return Rule(head, std::vector<Conjunct>(body.begin(), body.end()));
}

Nonterminal fresh_nonterminal(const std::string& stem, const NonterminalSet& taken) {
  std::string name = stem;
  while (taken.count(Nonterminal::plain(name))) name += '\'';
  return Nonterminal::plain(name);
}

void check_cleanup_input(const Grammar& g) {
  for (const auto& r : g.rules()) {
    bool has_solitary = false, has_empty_ctx = false, has_ctx = false;
    for (const auto& c : r.conjuncts()) {
      bool ok = false;
      switch (c.kind) {
        case ConjunctKind::Base:
          ok = (c.body.size() == 1) || is_nan(c.body);
          break;
        case ConjunctKind::ProperContext:
          ok = c.body.empty() || is_na(c.body);
          break;
        case ConjunctKind::ExtendedContext:
          ok = c.body.size() == 1 && is_nonterminal(c.body[0]);
          break;
      }
      if (!ok)
        throw PreconditionError("cleanup: unexpected conjunct '" + render_conjunct(c) + "' in " +
                                render_rule(r));
      has_solitary |= solitary_terminal(c).has_value();
      has_empty_ctx |= is_empty_context(c);
      has_ctx |= c.kind == ConjunctKind::ProperContext;
    }
    if (has_empty_ctx && !has_solitary)
      throw PreconditionError("cleanup: empty context without a solitary terminal in " +
                              render_rule(r));
    if (has_solitary && !has_ctx)
      throw PreconditionError("cleanup: solitary terminal without a proper context in " +
                              render_rule(r));
  }
}

Grammar sorted_grammar(const Grammar& like, std::vector<Rule> rules, Nonterminal start,
                       const NonterminalSet& nonterminals) {
  std::sort(rules.begin(), rules.end());
  NonterminalSet nts = nonterminals;
  nts.insert(start);
  return Grammar(like.alphabet(), std::move(nts), std::move(rules), std::move(start),
                 like.accepts_epsilon());
}

}  // namespace

// ---------------------------------------------------------------------------

Grammar oddify(const Grammar& g) {
  auto rep = validate_binary_nf(g);
  if (!rep.passed)
    throw PreconditionError("oddify: not in binary normal form: " +
                            render_rule(rep.violations.front().rule));
  const std::optional<char> eps;
  std::vector<std::optional<char>> slots{eps};
  for (char c : g.alphabet()) slots.push_back(c);
  auto tri = [](std::optional<char> x, const Nonterminal& a, std::optional<char> y) {
    return Nonterminal::triple(x, a, y);
  };

  // Context nonterminals of terminal rules X -> x & <D.
  std::map<std::pair<Nonterminal, char>, std::vector<Nonterminal>> context_of;
  for (const auto& r : g.rules()) {
    const auto& cs = r.conjuncts();
    if (auto a = solitary_terminal(cs[0]); a && !cs[1].body.empty())
      context_of[{r.head(), *a}].push_back(nonterminal_of(cs[1].body[0]));
  }
  auto contexts = [&](const Nonterminal& x, char a) -> const std::vector<Nonterminal>& {
    static const std::vector<Nonterminal> none;
    auto it = context_of.find({x, a});
    return it == context_of.end() ? none : it->second;
  };

  std::vector<Rule> rules;
  for (const auto& r : g.rules()) {
    const auto& cs = r.conjuncts();
    const Nonterminal& A = r.head();
    if (auto a = solitary_terminal(cs[0])) {
      if (cs[1].body.empty()) {
        rules.emplace_back(tri(eps, A, eps), std::vector<Conjunct>{cs[0], cs[1]});
      } else {
        const Nonterminal& D = nonterminal_of(cs[1].body[0]);
        for (char b : g.alphabet())
          rules.emplace_back(tri(eps, A, eps),
                             std::vector<Conjunct>{cs[0], Conjunct::proper({tri(eps, D, b), T(b)})});
      }
      continue;
    }
    for (auto x : slots)
      for (auto y : slots) {
        // Alternatives for each conjunct B C of the rule.
        std::vector<std::vector<std::vector<Conjunct>>> choices;
        for (const auto& c : cs) {
          const Nonterminal& B = nonterminal_of(c.body[0]);
          const Nonterminal& C = nonterminal_of(c.body[1]);
          std::vector<std::vector<Conjunct>> alts;
          for (char a : g.alphabet()) {
            alts.push_back({Conjunct::base({tri(x, B, a), T(a), tri(eps, C, y)})});
            alts.push_back({Conjunct::base({tri(x, B, eps), T(a), tri(a, C, y)})});
          }
          if (y)
            for (const auto& D : contexts(C, *y))
              alts.push_back({Conjunct::base({tri(x, B, eps)}), Conjunct::extended({tri(eps, D, eps)})});
          if (x)
            for (const auto& D : contexts(B, *x))
              alts.push_back({Conjunct::base({tri(eps, C, y)}), Conjunct::proper({tri(eps, D, eps), T(*x)})});
          choices.push_back(std::move(alts));
        }
        std::vector<size_t> pick(choices.size(), 0);
        for (;;) {
          std::vector<Conjunct> body;
          for (size_t i = 0; i < choices.size(); ++i)
            body.insert(body.end(), choices[i][pick[i]].begin(), choices[i][pick[i]].end());
          rules.emplace_back(tri(x, A, y), std::move(body));
          size_t i = 0;
          while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
          if (i == pick.size()) break;
        }
      }
  }
  Nonterminal start = tri(eps, g.start(), eps);
  auto g1 = Grammar::from_rules(std::move(rules), start, g.accepts_epsilon(), g.alphabet());
  NonterminalSet roots;
  for (auto y : slots) roots.insert(tri(eps, g.start(), y));
  auto trimmed = trim(g1, roots);
  std::vector<Rule> sorted = trimmed.rules();
  return sorted_grammar(trimmed, std::move(sorted), start, trimmed.nonterminals());
}

// ---------------------------------------------------------------------------

Grammar cleanup(const Grammar& g) {
  check_cleanup_input(g);

  // Step 1: rules with an empty context only ever derive e<a>; replace them
  // by A -> a & <e for every A that derives e<a>.
  std::map<Nonterminal, std::set<Body>> short_rules;
  {
    Recognizer rec(g);
    for (char a : g.alphabet()) {
      auto chart = rec.chart(std::string(1, a));
      for (const auto& n : g.nonterminals())
        if (chart.contains(n, 0, 1))
          short_rules[n].insert(Body{Conjunct::base({T(a)}), Conjunct::proper({})});
    }
  }

  // Step 2: substitute unit conjuncts to a least fixpoint; bodies with an
  // empty context are covered by step 1 and dropped.
  struct Source {
    Nonterminal head;
    Body rest;
    std::vector<Nonterminal> units;
  };
  std::vector<Source> sources;
  std::map<Nonterminal, std::vector<size_t>> users;  // unit -> source rules
  for (const auto& r : g.rules()) {
    Source s{r.head(), {}, {}};
    bool empty_ctx = false;
    for (const auto& c : r.conjuncts()) {
      if (is_unit(c))
        s.units.push_back(nonterminal_of(c.body[0]));
      else
        s.rest.insert(c);
      empty_ctx |= is_empty_context(c);
    }
    if (empty_ctx) continue;
    for (const auto& u : s.units) users[u].push_back(sources.size());
    sources.push_back(std::move(s));
  }

  std::map<Nonterminal, std::set<Body>> unit_free;
  std::vector<char> dirty(sources.size(), 1);
  bool again = true;
  while (again) {
    again = false;
    std::vector<char> next(sources.size(), 0);
    for (size_t k = 0; k < sources.size(); ++k) {
      if (!dirty[k]) continue;
      const Source& s = sources[k];
      std::vector<const std::set<Body>*> parts;
      bool empty = false;
      for (const auto& u : s.units) {
        auto it = unit_free.find(u);
        if (it == unit_free.end() || it->second.empty()) {
          empty = true;
          break;
        }
        parts.push_back(&it->second);
      }
      if (empty) continue;
      // Snapshot the operands: inserting into unit_free[s.head] may touch one.
      std::vector<std::vector<Body>> ops;
      for (const auto* p : parts) ops.emplace_back(p->begin(), p->end());
      std::vector<size_t> pick(ops.size(), 0);
      bool grew = false;
      for (;;) {
        Body body = s.rest;
        for (size_t i = 0; i < ops.size(); ++i) body.insert(ops[i][pick[i]].begin(), ops[i][pick[i]].end());
        bool has_empty_ctx = std::any_of(body.begin(), body.end(), is_empty_context);
        if (!has_empty_ctx && !contradictory(body)) grew |= unit_free[s.head].insert(std::move(body)).second;
        size_t i = 0;
        while (i < pick.size() && ++pick[i] == ops[i].size()) pick[i++] = 0;
        if (i == pick.size()) break;
      }
      if (grew) {
        again = true;
        auto it = users.find(s.head);
        if (it != users.end())
          for (size_t u : it->second) next[u] = 1;
      }
    }
    dirty = std::move(next);
  }

  // Step 3 already applied while building bodies.
  std::vector<Rule> rules;
  for (const auto& [head, bodies] : short_rules)
    for (const auto& b : bodies) rules.push_back(make_rule(head, b));
  for (const auto& [head, bodies] : unit_free)
    for (const auto& b : bodies) rules.push_back(make_rule(head, b));
  return sorted_grammar(g, drop_subsumed(std::move(rules)), g.start(), g.nonterminals());
}

// ---------------------------------------------------------------------------

namespace {

enum class Shape { Short, Context, Concat };

struct CleanRule {
  Shape shape = Shape::Concat;
  char terminal = 0;                       // Short, Context
  std::vector<std::array<Symbol, 3>> cats;  // Concat: B a C
  NonterminalSet contexts;                 // D's of <D b
  char context_last = 0;                   // b
  NonterminalSet extended;                 // E's
};

CleanRule classify_clean(const Rule& r) {
  CleanRule out;
  bool empty_ctx = false;
  std::optional<char> solitary;
  for (const auto& c : r.conjuncts()) {
    if (auto a = solitary_terminal(c)) {
      solitary = a;
    } else if (c.kind == ConjunctKind::Base && is_nan(c.body)) {
      out.cats.push_back({c.body[0], c.body[1], c.body[2]});
    } else if (is_empty_context(c)) {
      empty_ctx = true;
    } else if (c.kind == ConjunctKind::ProperContext && is_na(c.body)) {
      out.contexts.insert(nonterminal_of(c.body[0]));
      out.context_last = terminal_of(c.body[1]);
    } else if (c.kind == ConjunctKind::ExtendedContext && c.body.size() == 1 &&
               is_nonterminal(c.body[0])) {
      out.extended.insert(nonterminal_of(c.body[0]));
    } else {
      throw PreconditionError("deextend: unexpected conjunct '" + render_conjunct(c) + "' in " +
                              render_rule(r));
    }
  }
  Body body(r.conjuncts().begin(), r.conjuncts().end());
  bool ok;
  if (solitary && empty_ctx) {
    out.shape = Shape::Short;
    ok = r.conjuncts().size() == 2;
  } else if (solitary) {
    out.shape = Shape::Context;
    ok = out.cats.empty() && !out.contexts.empty();
  } else {
    ok = !out.cats.empty() && !empty_ctx;
  }
  if (!ok || contradictory(body))
    throw PreconditionError("deextend: rule is not in cleaned form: " + render_rule(r));
  out.terminal = solitary.value_or(0);
  return out;
}

/// Builds the conditional-triple grammar on demand from goals [{e}|A|{}]
/// (see deextend for the meaning of the components).
class ConditionalBuilder {
 public:
  ConditionalBuilder(const Grammar& g, const Limits& limits) : g_(g), limits_(limits) {
    for (const auto& r : g.rules()) by_head_[r.head()].push_back(classify_clean(r));
    // Extended contexts a derivation of A may leave pending: those of A's own
    // rules and of right operands, recursively.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [head, rules] : by_head_) {
        auto& acc = reach_[head];
        size_t before = acc.size();
        for (const auto& r : rules) {
          acc.insert(r.extended.begin(), r.extended.end());
          for (const auto& cat : r.cats) {
            const auto& sub = reach_[nonterminal_of(cat[2])];
            acc.insert(sub.begin(), sub.end());
          }
        }
        changed |= acc.size() != before;
      }
    }
  }

  static Nonterminal goal(ContextTag x, const Nonterminal& a, NonterminalSet y) {
    return Nonterminal::conditional(std::move(x), a, std::move(y));
  }
  static Nonterminal root(const Nonterminal& a) {
    return goal(ContextTag::empty_context(), a, {});
  }

  Grammar build(const NonterminalSet& roots, const Nonterminal& start) {
    for (const auto& a : roots) request(root(a));
    while (!queue_.empty()) {
      Nonterminal n = queue_.back();
      queue_.pop_back();
      expand(n);
    }
    return Grammar::from_rules(std::move(rules_), start, g_.accepts_epsilon(), g_.alphabet());
  }

 private:
  const Grammar& g_;
  const Limits& limits_;
  std::map<Nonterminal, std::vector<CleanRule>> by_head_;
  std::map<Nonterminal, NonterminalSet> reach_;
  NonterminalSet seen_;
  std::vector<Nonterminal> queue_;
  std::vector<Rule> rules_;

  const NonterminalSet& reach(const Nonterminal& a) {
    return reach_[a];
  }

  NonterminalSet restrict(const NonterminalSet& y, const Nonterminal& a) {
    const auto& r = reach(a);
    NonterminalSet out;
    std::set_intersection(y.begin(), y.end(), r.begin(), r.end(), std::inserter(out, out.end()));
    return out;
  }

  Nonterminal request(const Nonterminal& n) {
    if (seen_.insert(n).second) {
      queue_.push_back(n);
      limits_.check_size(seen_.size(), "deextend");
    }
    return n;
  }

  void expand(const Nonterminal& n) {
    const ContextTag& x = n.context();
    const Nonterminal& a = n.base();
    const NonterminalSet& y = n.pending();
    auto it = by_head_.find(a);
    if (it != by_head_.end())
      for (const auto& r : it->second) expand_rule(n, x, y, r);
    if (x.is_empty_context()) {
      // Check a pending extended context on the empty left context directly.
      for (const auto& e : reach(a)) {
        if (y.count(e)) continue;
        NonterminalSet more = y;
        more.insert(e);
        rules_.emplace_back(n, std::vector<Conjunct>{
                                   Conjunct::base({request(goal(x, a, std::move(more)))}),
                                   Conjunct::base({request(root(e))})});
      }
    }
  }

  void expand_rule(const Nonterminal& n, const ContextTag& x, const NonterminalSet& y,
                   const CleanRule& r) {
    if (!std::includes(y.begin(), y.end(), r.extended.begin(), r.extended.end())) return;
    switch (r.shape) {
      case Shape::Short:
        if (x.is_empty_context())
          rules_.emplace_back(n, std::vector<Conjunct>{Conjunct::base({T(r.terminal)}),
                                                       Conjunct::proper({})});
        return;
      case Shape::Context: {
        if (x.is_empty_context() || x.last_symbol() != r.context_last) return;
        NonterminalSet h = x.condition_set();
        h.insert(r.contexts.begin(), r.contexts.end());
        std::vector<Conjunct> body{Conjunct::base({T(r.terminal)})};
        for (const auto& d : h)
          body.push_back(Conjunct::proper({request(root(d)), T(r.context_last)}));
        rules_.emplace_back(n, std::move(body));
        return;
      }
      case Shape::Concat: {
        // The rule's own contexts are checked by the left operands together
        // with the inherited ones.
        ContextTag left = x;
        if (!r.contexts.empty()) {
          if (x.is_empty_context() || x.last_symbol() != r.context_last) return;
          NonterminalSet h = x.condition_set();
          h.insert(r.contexts.begin(), r.contexts.end());
          left = ContextTag::conditions(std::move(h), r.context_last);
        }
        // Per conjunct B a C: one alternative per set Y' of extended contexts
        // the left operand may leave for the right operand's context to check.
        std::vector<std::vector<Conjunct>> alts;
        for (const auto& cat : r.cats) {
          const Nonterminal& b = nonterminal_of(cat[0]);
          char a = terminal_of(cat[1]);
          const Nonterminal& c = nonterminal_of(cat[2]);
          std::vector<Nonterminal> pool(reach(b).begin(), reach(b).end());
          if (pool.size() > 20) throw BudgetExceeded("deextend: too many pending extended contexts");
          NonterminalSet cy = restrict(y, c);
          std::vector<Conjunct> here;
          for (uint64_t mask = 0; mask < (uint64_t{1} << pool.size()); ++mask) {
            NonterminalSet yp;
            for (size_t k = 0; k < pool.size(); ++k)
              if (mask >> k & 1) yp.insert(pool[k]);
            Nonterminal lhs = request(goal(left, b, yp));
            Nonterminal rhs = request(goal(ContextTag::conditions(yp, a), c, cy));
            here.push_back(Conjunct::base({lhs, T(a), rhs}));
          }
          alts.push_back(std::move(here));
        }
        std::vector<size_t> pick(alts.size(), 0);
        for (;;) {
          std::vector<Conjunct> body;
          for (size_t i = 0; i < alts.size(); ++i) body.push_back(alts[i][pick[i]]);
          rules_.emplace_back(n, std::move(body));
          size_t i = 0;
          while (i < pick.size() && ++pick[i] == alts[i].size()) pick[i++] = 0;
          if (i == pick.size()) break;
        }
        limits_.check_time("deextend");
        return;
      }
    }
  }
};

struct MergeResult {
  Grammar grammar;
  NonterminalSet created;  // powerset names introduced by the merge
};

MergeResult merge_impl(const Grammar& g, const NonterminalSet& roots, const Limits& limits) {
  for (const auto& r : g.rules())
    for (const auto& c : r.conjuncts()) {
      bool ok = (c.kind == ConjunctKind::Base && (c.body.size() == 1 ? is_terminal(c.body[0]) : is_nan(c.body))) ||
                (c.kind == ConjunctKind::ProperContext && (c.body.empty() || is_na(c.body)));
      if (!ok)
        throw PreconditionError("powerset_merge: unexpected conjunct '" + render_conjunct(c) +
                                "' in " + render_rule(r));
    }

  std::map<Nonterminal, std::vector<Body>> original;
  for (const auto& r : g.rules())
    original[r.head()].emplace_back(r.conjuncts().begin(), r.conjuncts().end());

  std::map<Nonterminal, NonterminalSet> created;  // name -> members
  std::vector<Nonterminal> queue;
  auto members_of = [&](const Nonterminal& q) {
    auto it = created.find(q);
    return it == created.end() ? NonterminalSet{q} : it->second;
  };
  auto set_name = [&](const NonterminalSet& members) {
    if (members.size() == 1) return *members.begin();
    Nonterminal p = Nonterminal::powerset(members);
    if (!created.count(p)) {
      if (g.nonterminals().count(p))
        throw GrammarError("powerset_merge: generated name " + p.name() + " already in use");
      created.emplace(p, members);
      queue.push_back(p);
      limits.check_size(g.nonterminals().size() + created.size(), "powerset_merge");
    }
    return p;
  };
  // Rewrites a conjoined body so that it has at most one context; nullopt if
  // the combination is contradictory.
  auto normalize = [&](const Body& body) -> std::optional<Body> {
    if (contradictory(body)) return std::nullopt;
    Body out;
    NonterminalSet ctx;
    char last = 0;
    for (const auto& c : body) {
      if (c.kind == ConjunctKind::ProperContext && !c.body.empty()) {
        auto m = members_of(nonterminal_of(c.body[0]));
        ctx.insert(m.begin(), m.end());
        last = terminal_of(c.body[1]);
      } else {
        out.insert(c);
      }
    }
    if (!ctx.empty()) out.insert(Conjunct::proper({set_name(ctx), T(last)}));
    return out;
  };

  std::vector<Rule> rules;
  for (const auto& [head, bodies] : original)
    for (const auto& b : bodies)
      if (auto nb = normalize(b)) rules.push_back(make_rule(head, *nb));
  while (!queue.empty()) {
    Nonterminal p = queue.back();
    queue.pop_back();
    std::vector<const std::vector<Body>*> parts;
    bool empty = false;
    for (const auto& m : created.at(p)) {
      auto it = original.find(m);
      if (it == original.end()) {
        empty = true;
        break;
      }
      parts.push_back(&it->second);
    }
    if (empty) continue;
    std::vector<size_t> pick(parts.size(), 0);
    for (;;) {
      Body body;
      for (size_t i = 0; i < parts.size(); ++i) {
        const Body& b = (*parts[i])[pick[i]];
        body.insert(b.begin(), b.end());
      }
      if (auto nb = normalize(body)) rules.push_back(make_rule(p, *nb));
      size_t i = 0;
      while (i < pick.size() && ++pick[i] == parts[i]->size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    limits.check_time("powerset_merge");
  }
  NonterminalSet nts = g.nonterminals();
  NonterminalSet made;
  for (const auto& [p, m] : created) {
    nts.insert(p);
    made.insert(p);
  }
  auto merged = trim(Grammar(g.alphabet(), std::move(nts), drop_subsumed(std::move(rules)), g.start(),
                             g.accepts_epsilon()),
                     roots);
  std::vector<Rule> sorted = merged.rules();
  return {sorted_grammar(merged, std::move(sorted), merged.start(), merged.nonterminals()),
          std::move(made)};
}

Symbol rename_symbol(const Symbol& s, const std::map<Nonterminal, Nonterminal>& m) {
  if (is_terminal(s)) return s;
  auto it = m.find(nonterminal_of(s));
  return it == m.end() ? s : Symbol{it->second};
}

Rule rename_rule(const Rule& r, const Nonterminal& head, const std::map<Nonterminal, Nonterminal>& m) {
  std::vector<Conjunct> cs;
  for (const auto& c : r.conjuncts()) {
    Conjunct d{c.kind, {}};
    for (const auto& s : c.body) d.body.push_back(rename_symbol(s, m));
    cs.push_back(std::move(d));
  }
  return Rule(head, std::move(cs));
}

/// Removes extended contexts. The result defines ~A for every A in roots that has
/// a non-empty language; its start symbol is ~(g.start()), possibly without
/// rules.
Grammar deextend_impl(const Grammar& g, const NonterminalSet& roots, const Limits& limits) {
  // Conditional triples [X|A|Y]: u<v> with u satisfying the context tag X
  // (empty, or u = wb with H(e<w>) for every H in X) that is in L(A) provided
  // every E in Y holds on e<uv>. Y is an allowance: any subset of it may stay
  // pending, so [X|A|Y] only depends on Y restricted to the extended contexts
  // reachable from A.
  ConditionalBuilder builder(g, limits);
  Nonterminal g3_start = ConditionalBuilder::root(g.start());
  NonterminalSet g3_roots;
  for (const auto& a : roots) g3_roots.insert(ConditionalBuilder::root(a));
  Grammar g3 = trim(builder.build(roots, g3_start), g3_roots);
  limits.check_time("deextend");

  Grammar g3c = trim(cleanup(g3), g3_roots);
  limits.check_time("deextend");
  MergeResult merged = merge_impl(g3c, g3_roots, limits);

  // Every remaining nonterminal X becomes the singleton {X}.
  std::map<Nonterminal, Nonterminal> rename;
  for (const auto& n : merged.grammar.nonterminals())
    if (!merged.created.count(n)) rename.emplace(n, Nonterminal::powerset({n}));
  auto renamed = [&](const Nonterminal& n) { return nonterminal_of(rename_symbol(n, rename)); };
  std::vector<Rule> rules;
  for (const auto& r : merged.grammar.rules()) rules.push_back(rename_rule(r, renamed(r.head()), rename));
  NonterminalSet nts;
  for (const auto& n : merged.grammar.nonterminals()) nts.insert(renamed(n));
  return sorted_grammar(g, std::move(rules), tilde(g.start()), nts);
}

}  // namespace

Nonterminal tilde(const Nonterminal& a) {
  return Nonterminal::powerset({ConditionalBuilder::root(a)});
}

Grammar deextend(const Grammar& g, const Budget& budget) {
  Limits limits(budget);
  Grammar g4 = deextend_impl(g, g.nonterminals(), limits);
  Nonterminal s = g4.start();
  bool referenced = false;
  for (const auto& r : g4.rules()) referenced |= referenced_nonterminals(r).count(s) > 0;
  if (!referenced) return g4;
  Nonterminal fresh = fresh_nonterminal("S'", g4.nonterminals());
  std::vector<Rule> rules;
  for (const Rule* r : g4.rules_for(s)) rules.emplace_back(fresh, r->conjuncts());
  rules.insert(rules.end(), g4.rules().begin(), g4.rules().end());
  NonterminalSet nts = g4.nonterminals();
  nts.insert(fresh);
  return Grammar(g4.alphabet(), std::move(nts), std::move(rules), fresh, g4.accepts_epsilon());
}

Grammar powerset_merge(const Grammar& g, const Budget& budget) {
  Limits limits(budget);
  return merge_impl(g, g.nonterminals(), limits).grammar;
}

Grammar to_even_odd_nf(const Grammar& g, const Budget& budget) {
  Limits limits(budget);
  Grammar g1 = oddify(g);
  const std::optional<char> eps;
  NonterminalSet roots{Nonterminal::triple(eps, g.start(), eps)};
  for (char a : g.alphabet()) roots.insert(Nonterminal::triple(eps, g.start(), a));
  Grammar g2 = trim(cleanup(g1), roots);
  limits.check_time("cleanup");
  Grammar g4 = deextend_impl(g2, roots, limits);

  NonterminalSet taken = g4.nonterminals();
  Nonterminal s = fresh_nonterminal("S'", taken);
  std::vector<Rule> rules;
  for (const Rule* r : g4.rules_for(tilde(Nonterminal::triple(eps, g.start(), eps))))
    rules.emplace_back(s, r->conjuncts());
  for (char a : g.alphabet()) {
    Nonterminal t = tilde(Nonterminal::triple(eps, g.start(), a));
    if (!g4.rules_for(t).empty()) rules.emplace_back(s, std::vector<Conjunct>{Conjunct::base({t, T(a)})});
  }
  std::sort(rules.begin(), rules.end());
  rules.insert(rules.end(), g4.rules().begin(), g4.rules().end());
  NonterminalSet nts = g4.nonterminals();
  nts.insert(s);
  return merge_equivalent(
      trim(Grammar(g.alphabet(), std::move(nts), std::move(rules), s, g.accepts_epsilon()), {}));
}

std::vector<ParityViolation> parity_audit(const Grammar& g, std::string_view w) {
  auto rep = validate_even_odd_nf(g);
  if (!rep.passed)
    throw PreconditionError("parity_audit: not in even-odd normal form: " +
                            render_rule(rep.violations.front().rule));
  std::vector<ParityViolation> out;
  for (const auto& it : derive_chart(g, w).items()) {
    if (!is_nonterminal(it.symbol) || nonterminal_of(it.symbol) == g.start()) continue;
    if (it.i % 2 == 1 || (it.j - it.i) % 2 == 0)
      out.push_back({nonterminal_of(it.symbol), it.i, it.j});
  }
  return out;
}

}  // namespace ctxgram
