#include "ctxgram/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ctxgram/hardest.hpp"
#include "ctxgram/normal_form.hpp"
#include "ctxgram/recognizer.hpp"
#include "ctxgram/text.hpp"
#include "ctxgram/verify.hpp"

namespace ctxgram {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Grammar load_grammar(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    buf << in.rdbuf();
  }
  return parse_grammar_text(buf.str());
}

// `_` stands for the empty word on the command line.
std::string word_arg(const std::string& w) { return w == "_" ? std::string() : w; }

void print_validation(std::ostream& out, const std::string& form, const ValidationReport& r) {
  for (const auto& n : r.notes) out << "  " << n << "\n";
  for (const auto& v : r.violations) out << "  " << render_rule(v.rule) << "    " << v.reason << "\n";
  out << form << (r.strict ? " (strict)" : "") << "\n";
  out << (r.passed ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grammars with left contexts: recognition, even-odd normal form, hardest-language encoding"};
  app.require_subcommand(1);

  Budget budget;
  double time_limit = 0;
  app.add_option("--max-nonterminals", budget.max_nonterminals, "Nonterminal budget for normalization")
      ->capture_default_str();
  app.add_option("--time-limit", time_limit, "Time limit for normalization in seconds (0 = none)");

  std::string grammar_path, word, form;
  size_t max_len = 0;
  bool repaired = false, literal = false, timing = false;
  unsigned jobs = 1;

  auto* check = app.add_subcommand("check", "Print accept or reject for a word (_ = empty word)");
  check->add_option("grammar", grammar_path)->required();
  check->add_option("word", word)->required();

  auto* normalize = app.add_subcommand("normalize", "Print the even-odd normal form");
  normalize->add_option("grammar", grammar_path)->required();

  auto* encode = app.add_subcommand("encode", "Print h(word) for the normalized grammar");
  encode->add_option("grammar", grammar_path)->required();
  encode->add_option("word", word)->required();

  auto* hardest = app.add_subcommand("hardest", "Print the hardest grammar");
  hardest->add_flag("--repaired", repaired, "Use F0 -> a c El b instead of the literal F0 -> a c Hl b");

  auto* verify = app.add_subcommand("verify", "Check w in L(G) iff h(w) in L(G0) for |w| <= max-len");
  verify->add_option("grammar", grammar_path)->required();
  verify->add_option("--max-len", max_len)->required();
  verify->add_flag("--literal", literal, "Check against the literal hardest grammar");
  verify->add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  verify->add_flag("--timing", timing, "Include elapsed time in the report");

  auto* enumerate = app.add_subcommand("enumerate", "Print L(G) up to a length, shortlex, _ = empty word");
  enumerate->add_option("grammar", grammar_path)->required();
  enumerate->add_option("--max-len", max_len)->required();

  auto* validate = app.add_subcommand("validate", "Check a normal form");
  validate->add_option("grammar", grammar_path)->required();
  validate->add_option("--form", form)->required()->check(CLI::IsMember({"binary", "even-odd"}));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }
  if (time_limit > 0) budget.time_limit_seconds = time_limit;

  try {
    if (check->parsed()) {
      bool ok = recognize(load_grammar(grammar_path), word_arg(word));
      out << (ok ? "accept" : "reject") << "\n";
      return ok ? 0 : 1;
    }
    if (normalize->parsed()) {
      out << render_grammar_text(to_even_odd_nf(load_grammar(grammar_path), budget));
      return 0;
    }
    if (encode->parsed()) {
      auto h = build_homomorphism(to_even_odd_nf(load_grammar(grammar_path), budget));
      out << encode_string(h, word_arg(word)) << "\n";
      return 0;
    }
    if (hardest->parsed()) {
      out << render_grammar_text(hardest_grammar(repaired ? HardestVariant::Repaired : HardestVariant::Literal));
      return 0;
    }
    if (verify->parsed()) {
      VerifyOptions opts;
      opts.budget = budget;
      opts.variant = literal ? HardestVariant::Literal : HardestVariant::Repaired;
      opts.jobs = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
      auto report = verify_reduction(load_grammar(grammar_path), max_len, opts, grammar_path);
      out << render_report(report, timing);
      return report.passed() ? 0 : 1;
    }
    if (enumerate->parsed()) {
      auto words = enumerate_language(load_grammar(grammar_path), max_len);
      std::vector<std::string> sorted(words.begin(), words.end());
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const std::string& a, const std::string& b) { return a.size() < b.size(); });
      for (const auto& w : sorted) out << (w.empty() ? "_" : w) << "\n";
      return 0;
    }
    if (validate->parsed()) {
      Grammar g = load_grammar(grammar_path);
      auto r = form == "binary" ? validate_binary_nf(g) : validate_even_odd_nf(g);
      print_validation(out, form == "binary" ? "binary normal form" : "even-odd normal form", r);
      return r.passed ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace ctxgram
