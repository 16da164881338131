#pragma once

#include <string>
#include <vector>

#include "ctxgram/text.hpp"

namespace fixtures {

struct Fixture {
  std::string name;
  std::string text;
};

// All in binary normal form.
inline const std::vector<Fixture>& all() {
  static const std::vector<Fixture> list = {
      {"sample", "S -> A B\nA -> a & < _\nB -> b & < A\n"},
      {"single", "S -> a & < _\n"},
      // a^n b^n. U holds on every non-empty prefix, so the terminal rules
      // are context-free in effect
      {"anbn",
       "S -> A B | A T\n"
       "T -> S B\n"
       "A -> a & < _ | a & < U\n"
       "B -> b & < U\n"
       "U -> U X | a & < _ | b & < _\n"
       "X -> a & < U | b & < U\n"},
      // proper and extended contexts interacting
      {"contexts",
       "S -> A B | S C\n"
       "A -> a & < _\n"
       "B -> b & < A | b & < S\n"
       "C -> a & < S | b & < S\n"},
      // starts with a and ends with b: two concatenations conjoined
      {"conjunction",
       "S -> A R & U B\n"
       "R -> R X | a & < U | b & < U\n"
       "X -> a & < U | b & < U\n"
       "U -> U X | a & < _ | b & < _\n"
       "A -> a & < _\n"
       "B -> b & < U\n"},
      {"epsilon", "S -> _\nS -> A B\nA -> a & < _\nB -> b & < A\n"},
  };
  return list;
}

inline ctxgram::Grammar load(const std::string& name) {
  for (const auto& f : all())
    if (f.name == name) return ctxgram::parse_grammar_text(f.text);
  throw std::out_of_range("no fixture " + name);
}

}  // namespace fixtures
