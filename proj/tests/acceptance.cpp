// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ctxgram/cli.hpp"
#include "ctxgram/hardest.hpp"
#include "ctxgram/normal_form.hpp"
#include "ctxgram/recognizer.hpp"
#include "ctxgram/text.hpp"
#include "ctxgram/verify.hpp"
#include "fixtures.hpp"
#include "random_grammar.hpp"

using namespace ctxgram;

namespace {

const char* kListing[] = {
    "A -> A a",         "A -> a",
    "B -> a B",         "B -> c B",
    "B -> a",           "B -> c",
    "C -> a C",         "C -> b C",
    "C -> c C",         "C -> d C",
    "C -> e C",         "C -> _",
    "D -> C # D",       "D -> _",
    "Er -> Fr Er & A c Erp", "Er -> d C #",
    "Erp -> Fr Er & A c Erp", "Erp -> d C # D",
    "Fr -> a Fr b",     "Fr -> a c C # El b",
    "El -> El Fl & Elp c A", "El -> C d",
    "El -> C d Hl e",   "Hl -> c A & <= El",
    "Hl -> c & < El",   "Elp -> El Fl & Elp c A",
    "Elp -> D C d",     "Fl -> b Fl a",
    "Fl -> b Er C c a", "S0 -> B d S0",
    "S0 -> F0 Er & A c E0", "E0 -> F0 Er & A c E0",
    "E0 -> d C # D",    "F0 -> a F0 b",
    "F0 -> a c Hl b",
};

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.ok) ++failures;
  std::printf("%s  %-28s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", name, s, o.detail.c_str());
  std::fflush(stdout);
}

std::string cli_out(std::vector<std::string> args) {
  std::ostringstream out, err;
  run_cli(args, out, err);
  return out.str();
}

void each_string(const std::set<char>& sigma, size_t n, const std::function<void(const std::string&)>& f) {
  std::vector<std::string> all{""};
  for (size_t k = 0; k < all.size(); ++k)
    if (all[k].size() < n)
      for (char c : sigma) all.push_back(all[k] + c);
  for (const auto& w : all) f(w);
}

std::set<std::string> rendered(const Grammar& g) {
  std::set<std::string> out;
  for (const auto& r : g.rules()) out.insert(render_rule(r));
  return out;
}

Outcome g0_fidelity() {
  Grammar g = parse_grammar_text(cli_out({"hardest"}));
  std::string text = "%start S0\n";
  for (const char* r : kListing) text += std::string(r) + "\n";
  bool same = rendered(g) == rendered(parse_grammar_text(text));
  std::string d = std::to_string(g.nonterminals().size()) + " nonterminals, " +
                  std::to_string(g.rules().size()) + " rules";
  return {same && g.nonterminals().size() == 14 && g.rules().size() == 35, d + (same ? ", listing matches" : ", listing differs")};
}

Outcome oracle_agreement() {
  std::mt19937_64 rng(20261017);
  int agree = 0, accepted = 0;
  for (int k = 0; k < 100; ++k) {
    Grammar g = testing_support::random_grammar(rng, 3, 2);
    std::string w = testing_support::random_string(rng, g, 5);
    bool a = recognize(g, w), b = recognize_topdown(g, w);
    agree += a == b;
    accepted += a;
  }
  return {agree == 100, std::to_string(agree) + "/100 agree, " + std::to_string(accepted) + " accepted"};
}

Outcome pipeline() {
  Outcome o;
  for (const auto& f : fixtures::all()) {
    Grammar g = parse_grammar_text(f.text);
    Grammar n = to_even_odd_nf(g);
    bool same = enumerate_language(g, 6) == enumerate_language(n, 6) && recognize(g, "") == recognize(n, "");
    if (!same) {
      o.ok = false;
      o.detail += f.name + " differs; ";
    }
  }
  o.detail += std::to_string(fixtures::all().size()) + " fixtures, |w| <= 6";
  return o;
}

Outcome parity() {
  size_t bad = 0, inputs = 0;
  for (const auto& f : fixtures::all()) {
    Grammar n = to_even_odd_nf(parse_grammar_text(f.text));
    each_string(n.alphabet(), 6, [&](const std::string& w) {
      bad += parity_audit(n, w).size();
      ++inputs;
    });
  }
  return {bad == 0, std::to_string(inputs) + " inputs, " + std::to_string(bad) + " violations"};
}

VerifyOptions parallel(HardestVariant v) {
  VerifyOptions o;
  o.variant = v;
  o.jobs = std::max(1u, std::thread::hardware_concurrency());
  return o;
}

Outcome reduction() {
  Outcome o;
  size_t tested = 0;
  for (const auto& f : fixtures::all()) {
    auto r = verify_reduction(parse_grammar_text(f.text), 2, parallel(HardestVariant::Repaired), f.name);
    tested += r.tested + 1;
    if (!r.passed()) {
      o.ok = false;
      o.detail += f.name + ": " + std::to_string(r.mismatches.size()) + " mismatches; ";
    }
  }
  o.detail += std::to_string(tested) + " words incl. empty, G0 with F0 -> a c El b";
  return o;
}

// Not a criterion: documents what the literal F0 rule does.
void literal_note() {
  size_t lost = 0, total = 0;
  for (const char* name : {"sample", "single", "anbn"}) {
    auto r = verify_reduction(fixtures::load(name), 2, parallel(HardestVariant::Literal), name);
    for (const auto& m : r.mismatches) lost += m.expected && !m.got;
    total += r.mismatches.size();
  }
  std::printf("note  literal F0 -> a c Hl b: %zu mismatches on sample/single/anbn, %zu members rejected\n", total,
              lost);
}

Outcome scanning_helpers() {
  Grammar g0 = hardest_grammar(HardestVariant::Repaired);
  Nonterminal er = Nonterminal::plain("Er"), erp = Nonterminal::plain("Erp");
  Nonterminal el = Nonterminal::plain("El"), elp = Nonterminal::plain("Elp");
  size_t checks = 0, bad = 0;
  auto expect = [&](bool c) {
    ++checks;
    bad += !c;
  };
  for (const char* name : {"sample", "contexts", "epsilon"}) {
    Grammar n = to_even_odd_nf(fixtures::load(name));
    auto h = build_homomorphism(n);
    std::vector<char> sigma(n.alphabet().begin(), n.alphabet().end());
    std::vector<std::string> us{"", std::string(1, sigma[0])}, vs{""};
    for (char c : sigma) vs.push_back(std::string(1, c));
    vs.push_back(std::string{sigma.front(), sigma.back()});

    // Case 1: d y # suffix of the last image of u, followed by h(v).
    for (const auto& u : us) {
      if (u.empty()) continue;
      for (const auto& v : vs) {
        std::string hu = encode_string(h, u), hv = encode_string(h, v);
        Chart chart = derive_chart(g0, hu + hv);
        size_t last = hu.rfind('#', hu.size() - 2);
        last = last == std::string::npos ? 0 : last + 1;
        for (size_t p = last; p < hu.size(); ++p) {
          if (hu[p] != 'd') continue;
          expect(chart.contains(er, p, hu.size() + hv.size()) == v.empty());
          expect(chart.contains(erp, p, hu.size() + hv.size()));
        }
      }
    }
    // Case 2: h(u) h(v) x d prefix of the next image, from the end of h(u).
    for (const auto& u : us)
      for (const auto& v : vs) {
        std::string hu = encode_string(h, u), hv = encode_string(h, v), next = h.image(sigma.back());
        Chart chart = derive_chart(g0, hu + hv + next);
        for (size_t q = 0; q < next.size(); ++q) {
          if (next[q] != 'd') continue;
          size_t j = hu.size() + hv.size() + q + 1;
          expect(chart.contains(el, hu.size(), j) == v.empty());
          expect(chart.contains(elp, hu.size(), j));
        }
      }
  }
  return {bad == 0, std::to_string(checks) + " item checks, " + std::to_string(bad) + " wrong"};
}

Outcome cleanup_semantics() {
  size_t compared = 0, bad = 0;
  for (const auto& f : fixtures::all()) {
    Grammar g1 = oddify(parse_grammar_text(f.text));
    Grammar g2 = cleanup(g1);
    Recognizer r1(g1), r2(g2);
    each_string(g1.alphabet(), 5, [&](const std::string& w) {
      Chart c1 = r1.chart(w), c2 = r2.chart(w);
      for (const auto& a : g1.nonterminals()) {
        ++compared;
        bad += c1.spans(a) != c2.spans(a);
      }
    });
  }
  return {bad == 0, std::to_string(compared) + " (nonterminal, input) pairs, " + std::to_string(bad) + " differ"};
}

Outcome determinism() {
  Outcome o;
  size_t runs = 0;
  auto same = [&](std::vector<std::string> args) {
    std::string first = cli_out(args);
    for (int k = 0; k < 2; ++k, ++runs)
      if (cli_out(args) != first) {
        o.ok = false;
        o.detail += args[0] + " differs; ";
      }
  };
  same({"hardest"});
  same({"hardest", "--repaired"});
  auto dir = std::filesystem::temp_directory_path() / "ctxgram_acceptance";
  std::filesystem::create_directories(dir);
  for (const auto& f : fixtures::all()) {
    auto p = (dir / (f.name + ".gr")).string();
    std::ofstream(p) << f.text;
    same({"normalize", p});
    same({"encode", p, "ab"});
  }
  auto a = cli_out({"verify", (dir / "contexts.gr").string(), "--max-len", "2", "--jobs", "1"});
  auto b = cli_out({"verify", (dir / "contexts.gr").string(), "--max-len", "2", "--jobs", "4"});
  if (a != b) {
    o.ok = false;
    o.detail += "verify depends on --jobs; ";
  }
  o.detail += std::to_string(runs) + " repeated runs byte-identical";
  return o;
}

}  // namespace

int main() {
  criterion("G0 fidelity", g0_fidelity);
  criterion("recognizer oracle agreement", oracle_agreement);
  criterion("even-odd pipeline", pipeline);
  criterion("parity invariant", parity);
  criterion("hardest reduction", reduction);
  literal_note();
  criterion("E and E+ scanning helpers", scanning_helpers);
  criterion("cleanup semantics", cleanup_semantics);
  criterion("determinism", determinism);
  std::printf("%s\n", failures == 0 ? "ALL PASS" : (std::to_string(failures) + " FAILED").c_str());
  return failures == 0 ? 0 : 1;
}
