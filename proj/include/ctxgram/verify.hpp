#pragma once

#include <string>
#include <vector>

#include "ctxgram/grammar.hpp"
#include "ctxgram/hardest.hpp"
#include "ctxgram/normal_form.hpp"

namespace ctxgram {

struct Mismatch {
  std::string word;
  bool expected = false;  // w in L(G)
  bool got = false;       // h(w) in L(G0), or the epsilon rule for w = e
};

struct VerificationReport {
  std::string grammar_name;
  size_t max_len = 0;
  /// Non-empty strings compared; the empty word is checked separately.
  size_t tested = 0;
  std::vector<Mismatch> mismatches;  // in shortlex order
  double elapsed_seconds = 0;

  bool passed() const { return mismatches.empty(); }
};

struct VerifyOptions {
  Budget budget;
  HardestVariant variant = HardestVariant::Repaired;
  /// Worker threads for the per-string checks; results do not depend on it.
  unsigned jobs = 1;
};

/// Normalizes g, builds h and compares w in L(g) with h(w) in L(G0) for all
/// w with |w| <= max_len. For w = e the right side is "the normalized grammar
/// keeps the epsilon flag, or e is in L(G0)".
VerificationReport verify_reduction(const Grammar& g, size_t max_len, const VerifyOptions& opts = {},
                                    const std::string& name = "");

/// Same comparison with a given normalized grammar and homomorphism.
VerificationReport verify_encoding(const Grammar& g, const Grammar& normalized, const Homomorphism& h,
                                   size_t max_len, const VerifyOptions& opts = {},
                                   const std::string& name = "");

/// Aligned plain text ending with a line PASS or FAIL. Elapsed time is only
/// printed on request so that the default output is reproducible.
std::string render_report(const VerificationReport& r, bool with_time = false);

}  // namespace ctxgram
