#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctxgram/grammar.hpp"

namespace ctxgram {

enum class HardestVariant {
  /// The standard rule listing, including F0 -> a F0 b | a c Hl b.
  Literal,
  /// F0 -> a F0 b | a c El b. Same nonterminals and rule count. The literal
  /// second F0 rule needs "cc" right after the a-block of a start rule
  /// representation, which no image contains.
  Repaired,
};

/// The fixed grammar over {a,b,c,d,e,#}: nonterminals S0, A, B, C, D, Er,
/// Erp, Fr, El, Elp, Fl, Hl, E0, F0 and 35 rules, start S0.
Grammar hardest_grammar(HardestVariant variant = HardestVariant::Literal);

/// Conjuncts alpha_0 = e, alpha_1, ... of an even-odd grammar: every conjunct
/// of every rule plus the body beta of every context <beta. Ordered by form
/// (a, <e, Da, <Da, BaC), then by rendering.
struct ConjunctTable {
  std::vector<Conjunct> entries;
  std::map<Conjunct, size_t> index;

  size_t index_of(const Conjunct& c) const;
  size_t size() const { return entries.size(); }
};

ConjunctTable enumerate_conjuncts(const Grammar& g);

/// Conjunct indices of a rule body, ascending.
std::vector<size_t> rule_indices(const std::vector<Conjunct>& body, const ConjunctTable& t);

/// lambda(r) = c a^i1 ... c a^im and rho(r) = a^im c ... a^i1 c.
std::string lambda_repr(const std::vector<Conjunct>& body, const ConjunctTable& t);
std::string rho_repr(const std::vector<Conjunct>& body, const ConjunctTable& t);

/// Expansion of alpha_k:
///   BaC : prod over B -> r, C -> r' of lambda(r) b^k rho(r') d
///   Ba  : prod over B -> r of lambda(r) b^k d
///   <al : c a^l e b^k d
///   a   : b^k d
std::string sigma_expansion(size_t k, const Grammar& g, const ConjunctTable& t);

/// h(s) = h'(s) d h''(s) #.
struct Homomorphism {
  struct Image {
    std::string head;  // h': rho(r) d for every start rule r
    std::string body;  // h''(s): expansions of the conjuncts s takes part in
    std::string full() const { return head + "d" + body + "#"; }
  };
  std::map<char, Image> images;

  std::string image(char s) const;
};

Homomorphism build_homomorphism(const Grammar& g);

std::string encode_string(const Homomorphism& h, std::string_view w);

}  // namespace ctxgram
