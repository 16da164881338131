#pragma once

#include <string>
#include <string_view>

#include "ctxgram/grammar.hpp"

namespace ctxgram {

/// Syntax error in grammar text, with 1-based line and column.
class SyntaxError : public GrammarError {
 public:
  SyntaxError(size_t line, size_t column, const std::string& what)
      : GrammarError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": " + what),
        line_(line),
        column_(column) {}

  size_t line() const { return line_; }
  size_t column() const { return column_; }

 private:
  size_t line_, column_;
};

/// Grammar text format:
///
///   // comment
///   S -> A B | a & < _
///   A -> a & <= S b
///
/// One rule per line, alternatives separated by `|`, conjuncts by `&`.
/// `<` marks a proper left context, `<=` an extended one, `_` is the empty
/// word. The start symbol is the head of the first rule; a start rule
/// `S -> _` sets the epsilon flag instead of being stored. Optional header
/// directives `%start X`, `%alphabet a b ...` and `%nonterminals X Y ...`
/// declare a start symbol, extra terminals, and nonterminals without rules.
Grammar parse_grammar_text(std::string_view text);

/// Canonical text; parse_grammar_text(render_grammar_text(g)) == g.
std::string render_grammar_text(const Grammar& g);

}  // namespace ctxgram
