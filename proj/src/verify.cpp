#include "ctxgram/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include "ctxgram/recognizer.hpp"

namespace ctxgram {

namespace {

std::vector<std::string> shortlex(const std::set<char>& sigma, size_t max_len) {
  std::vector<std::string> out;
  std::vector<std::string> layer{""};
  for (size_t n = 1; n <= max_len; ++n) {
    std::vector<std::string> next;
    for (const auto& w : layer)
      for (char c : sigma) next.push_back(w + c);
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace

VerificationReport verify_encoding(const Grammar& g, const Grammar& normalized, const Homomorphism& h,
                                   size_t max_len, const VerifyOptions& opts, const std::string& name) {
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport report;
  report.grammar_name = name;
  report.max_len = max_len;

  Recognizer source(g);
  Recognizer g0(hardest_grammar(opts.variant));

  bool eps_expected = source.recognize("");
  bool eps_got = normalized.accepts_epsilon() || g0.recognize("");
  if (eps_expected != eps_got) report.mismatches.push_back({"", eps_expected, eps_got});

  auto words = shortlex(g.alphabet(), max_len);
  report.tested = words.size();
  std::vector<char> expected(words.size()), got(words.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t k; (k = next.fetch_add(1)) < words.size();) {
      expected[k] = source.recognize(words[k]);
      got[k] = g0.recognize(encode_string(h, words[k]));
    }
  };
  unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (size_t k = 0; k < words.size(); ++k)
    if (expected[k] != got[k]) report.mismatches.push_back({words[k], bool(expected[k]), bool(got[k])});

  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

VerificationReport verify_reduction(const Grammar& g, size_t max_len, const VerifyOptions& opts,
                                    const std::string& name) {
  auto t0 = std::chrono::steady_clock::now();
  auto report_ok = validate_binary_nf(g);
  if (!report_ok.passed) throw PreconditionError("verify_reduction: grammar is not in binary normal form");
  Grammar normalized = to_even_odd_nf(g, opts.budget);
  Homomorphism h = build_homomorphism(normalized);
  auto report = verify_encoding(g, normalized, h, max_len, opts, name);
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string render_report(const VerificationReport& r, bool with_time) {
  std::ostringstream out;
  auto line = [&](const std::string& key, const std::string& value) {
    out << key << std::string(14 - key.size(), ' ') << value << "\n";
  };
  line("grammar", r.grammar_name.empty() ? "-" : r.grammar_name);
  line("max length", std::to_string(r.max_len));
  line("tested", std::to_string(r.tested) + " non-empty, plus the empty word");
  line("mismatches", std::to_string(r.mismatches.size()));
  if (with_time) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f s", r.elapsed_seconds);
    line("elapsed", buf);
  }
  for (const auto& m : r.mismatches) {
    std::string w = m.word.empty() ? "_" : m.word;
    out << "  " << w << std::string(w.size() < 12 ? 12 - w.size() : 1, ' ') << "expected "
        << (m.expected ? "accept" : "reject") << ", got " << (m.got ? "accept" : "reject") << "\n";
  }
  out << (r.passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace ctxgram
