#pragma once

#include <random>
#include <string>

#include "ctxgram/grammar.hpp"

namespace testing_support {

/// Small random grammar with up to `max_nt` nonterminals over the first
/// `max_sigma` letters; bodies mix terminals, nonterminals and all three
/// conjunct kinds.
inline ctxgram::Grammar random_grammar(std::mt19937_64& rng, int max_nt, int max_sigma) {
  using namespace ctxgram;
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };
  int nn = 1 + pick(max_nt);
  int ns = 1 + pick(max_sigma);
  std::vector<Nonterminal> nts;
  for (int k = 0; k < nn; ++k) nts.push_back(Nonterminal::plain(std::string(1, "SAB"[k % 3]) + (k >= 3 ? std::to_string(k) : "")));
  auto symbol = [&]() -> Symbol {
    if (pick(2)) return Terminal{static_cast<char>('a' + pick(ns))};
    return nts[pick(nn)];
  };
  auto body = [&](int maxlen) {
    std::vector<Symbol> b;
    int len = pick(maxlen + 1);
    for (int k = 0; k < len; ++k) b.push_back(symbol());
    return b;
  };
  std::vector<Rule> rules;
  int nr = 1 + pick(2 * nn + 1);
  for (int k = 0; k < nr; ++k) {
    std::vector<Conjunct> cs{Conjunct::base(body(3))};
    if (pick(3) == 0) cs.push_back(Conjunct::base(body(2)));
    if (pick(2) == 0) cs.push_back(Conjunct::proper(body(2)));
    if (pick(4) == 0) cs.push_back(Conjunct::extended(body(2)));
    rules.emplace_back(nts[pick(nn)], std::move(cs));
  }
  std::set<char> alphabet;
  for (int k = 0; k < ns; ++k) alphabet.insert(static_cast<char>('a' + k));
  return Grammar::from_rules(std::move(rules), nts[0], pick(4) == 0, alphabet);
}

inline std::string random_string(std::mt19937_64& rng, const ctxgram::Grammar& g, size_t max_len) {
  std::vector<char> sigma(g.alphabet().begin(), g.alphabet().end());
  size_t len = rng() % (max_len + 1);
  std::string w;
  for (size_t k = 0; k < len; ++k) w += sigma[rng() % sigma.size()];
  return w;
}

}  // namespace testing_support
