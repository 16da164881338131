#include "ctxgram/hardest.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "ctxgram/recognizer.hpp"
#include "ctxgram/text.hpp"

namespace ctxgram {

namespace {

constexpr const char* kHardestRules = R"(%start S0
A -> A a | a
B -> a B | c B | a | c
C -> a C | b C | c C | d C | e C | _
D -> C # D | _
Er -> Fr Er & A c Erp | d C #
Erp -> Fr Er & A c Erp | d C # D
Fr -> a Fr b | a c C # El b
El -> El Fl & Elp c A | C d | C d Hl e
Hl -> c A & <= El | c & < El
Elp -> El Fl & Elp c A | D C d
Fl -> b Fl a | b Er C c a
S0 -> B d S0 | F0 Er & A c E0
E0 -> F0 Er & A c E0 | d C # D
F0 -> a F0 b | %F0%
)";

int form_rank(const Conjunct& c) {
  const auto& b = c.body;
  if (c.kind == ConjunctKind::ProperContext) return b.empty() ? 2 : 4;
  if (c.kind == ConjunctKind::ExtendedContext) return 6;
  switch (b.size()) {
    case 0: return 0;
    case 1: return 1;
    case 2: return 3;
    default: return 5;
  }
}

bool contains_terminal(const Conjunct& c, char s) {
  return std::any_of(c.body.begin(), c.body.end(),
                     [s](const Symbol& x) { return is_terminal(x) && terminal_of(x) == s; });
}

std::optional<char> solitary_terminal(const Rule& r) {
  for (const auto& c : r.conjuncts())
    if (c.kind == ConjunctKind::Base && c.body.size() == 1 && is_terminal(c.body[0]))
      return terminal_of(c.body[0]);
  return std::nullopt;
}

void require_even_odd(const Grammar& g) {
  auto report = validate_even_odd_nf(g);
  if (!report.passed) {
    std::string msg = "grammar is not in even-odd normal form";
    if (!report.violations.empty())
      msg += ": " + render_rule(report.violations.front().rule) + " (" +
             report.violations.front().reason + ")";
    else if (!report.notes.empty())
      msg += ": " + report.notes.front();
    throw PreconditionError(msg);
  }
}

}  // namespace

Grammar hardest_grammar(HardestVariant variant) {
  std::string text = kHardestRules;
  auto pos = text.find("%F0%");
  text.replace(pos, 4, variant == HardestVariant::Literal ? "a c Hl b" : "a c El b");
  return parse_grammar_text(text);
}

size_t ConjunctTable::index_of(const Conjunct& c) const {
  auto it = index.find(c);
  if (it == index.end()) throw PreconditionError("conjunct not indexed: " + render_conjunct(c));
  return it->second;
}

ConjunctTable enumerate_conjuncts(const Grammar& g) {
  require_even_odd(g);
  std::set<Conjunct> all;
  for (const auto& r : g.rules())
    for (const auto& c : r.conjuncts()) {
      all.insert(c);
      if (c.kind == ConjunctKind::ProperContext) all.insert(Conjunct::base(c.body));
    }
  all.insert(Conjunct::base({}));

  std::vector<std::pair<std::pair<int, std::string>, Conjunct>> keyed;
  for (const auto& c : all) keyed.push_back({{form_rank(c), render_conjunct(c)}, c});
  std::sort(keyed.begin(), keyed.end());

  ConjunctTable t;
  for (auto& [key, c] : keyed) {
    t.index.emplace(c, t.entries.size());
    t.entries.push_back(std::move(c));
  }
  return t;
}

std::vector<size_t> rule_indices(const std::vector<Conjunct>& body, const ConjunctTable& t) {
  std::vector<size_t> ix;
  for (const auto& c : body) ix.push_back(t.index_of(c));
  std::sort(ix.begin(), ix.end());
  ix.erase(std::unique(ix.begin(), ix.end()), ix.end());
  return ix;
}

std::string lambda_repr(const std::vector<Conjunct>& body, const ConjunctTable& t) {
  std::string out;
  for (size_t i : rule_indices(body, t)) {
    out += 'c';
    out.append(i, 'a');
  }
  return out;
}

std::string rho_repr(const std::vector<Conjunct>& body, const ConjunctTable& t) {
  std::string out = lambda_repr(body, t);
  std::reverse(out.begin(), out.end());
  return out;
}

std::string sigma_expansion(size_t k, const Grammar& g, const ConjunctTable& t) {
  if (k == 0 || k >= t.size()) throw PreconditionError("no expansion for conjunct index " + std::to_string(k));
  const Conjunct& c = t.entries[k];
  const std::string marker(k, 'b');

  if (c.kind == ConjunctKind::ProperContext) {
    size_t l = t.index_of(Conjunct::base(c.body));
    return "c" + std::string(l, 'a') + "e" + marker + "d";
  }
  if (c.kind != ConjunctKind::Base) throw PreconditionError("no expansion for " + render_conjunct(c));

  const auto& b = c.body;
  if (b.size() == 1 && is_terminal(b[0])) return marker + "d";
  if (b.size() == 2 && is_nonterminal(b[0]) && is_terminal(b[1])) {
    std::string out;
    for (const Rule* r : g.rules_for(nonterminal_of(b[0])))
      out += lambda_repr(r->conjuncts(), t) + marker + "d";
    return out;
  }
  if (b.size() == 3 && is_nonterminal(b[0]) && is_terminal(b[1]) && is_nonterminal(b[2])) {
    auto left = g.rules_for(nonterminal_of(b[0]));
    auto right = g.rules_for(nonterminal_of(b[2]));
    std::string out;
    for (const Rule* r : left) {
      std::string lam = lambda_repr(r->conjuncts(), t) + marker;
      for (const Rule* r2 : right) out += lam + rho_repr(r2->conjuncts(), t) + "d";
    }
    return out;
  }
  throw PreconditionError("no expansion for " + render_conjunct(c));
}

std::string Homomorphism::image(char s) const {
  auto it = images.find(s);
  if (it == images.end()) throw InputError(std::string("no image for symbol '") + s + "'");
  return it->second.full();
}

Homomorphism build_homomorphism(const Grammar& g) {
  ConjunctTable t = enumerate_conjuncts(g);

  std::string head;
  for (const Rule* r : g.rules_for(g.start())) head += rho_repr(r->conjuncts(), t) + "d";

  std::vector<std::string> sigma(t.size());
  for (size_t k = 1; k < t.size(); ++k) sigma[k] = sigma_expansion(k, g, t);

  std::map<char, std::set<size_t>> context_of;
  for (const auto& r : g.rules()) {
    auto a = solitary_terminal(r);
    if (!a) continue;
    for (const auto& c : r.conjuncts())
      if (c.kind == ConjunctKind::ProperContext) context_of[*a].insert(t.index_of(c));
  }

  Homomorphism h;
  for (char s : g.alphabet()) {
    Homomorphism::Image img;
    img.head = head;
    for (size_t k = 1; k < t.size(); ++k) {
      const Conjunct& c = t.entries[k];
      bool take = c.kind == ConjunctKind::Base ? contains_terminal(c, s) : context_of[s].count(k) > 0;
      if (take) img.body += sigma[k];
    }
    h.images.emplace(s, std::move(img));
  }
  return h;
}

std::string encode_string(const Homomorphism& h, std::string_view w) {
  std::string out;
  for (char s : w) out += h.image(s);
  return out;
}

}  // namespace ctxgram
