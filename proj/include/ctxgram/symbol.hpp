#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace ctxgram {

/// A terminal symbol: one printable character (lowercase letter, digit or '#').
struct Terminal {
  char ch;

  friend auto operator<=>(const Terminal&, const Terminal&) = default;
};

bool is_terminal_char(char c);

class Nonterminal;
class ContextTag;
using NonterminalSet = std::set<Nonterminal>;

/// Thrown when a nonterminal identifier cannot be parsed.
class IdentifierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonterminal identifier. Structured identifiers (triples, conditional
/// triples, powersets) compare by value through their canonical rendering.
class Nonterminal {
 public:
  enum class Kind { Plain, Triple, Conditional, Powerset };

  static Nonterminal plain(std::string name);
  /// [x|A|y]; std::nullopt stands for the empty string.
  static Nonterminal triple(std::optional<char> left, const Nonterminal& base,
                            std::optional<char> right);
  /// [X|A|Y]
  static Nonterminal conditional(ContextTag ctx, const Nonterminal& base,
                                 NonterminalSet pending);
  /// {A,B,...}; members must be non-empty.
  static Nonterminal powerset(NonterminalSet members);

  Kind kind() const;
  /// Canonical text form; also the identity of the nonterminal.
  const std::string& name() const;

  // Triple and conditional accessors.
  std::optional<char> left() const;
  std::optional<char> right() const;
  const Nonterminal& base() const;
  const ContextTag& context() const;
  const NonterminalSet& pending() const;
  // Powerset accessor.
  const NonterminalSet& members() const;

  friend bool operator==(const Nonterminal& a, const Nonterminal& b) {
    return a.node_ == b.node_ || a.name() == b.name();
  }
  friend std::strong_ordering operator<=>(const Nonterminal& a, const Nonterminal& b) {
    return a.name() <=> b.name();
  }

 private:
  struct Node;
  explicit Nonterminal(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Condition attached to the left context of a conditional nonterminal:
/// either the empty context, or a set of nonterminals that must all hold on
/// the context with its last symbol removed, plus that last symbol.
class ContextTag {
 public:
  static ContextTag empty_context();
  static ContextTag conditions(NonterminalSet conds, char last);

  bool is_empty_context() const { return empty_; }
  const NonterminalSet& condition_set() const { return conds_; }
  char last_symbol() const { return last_; }

  std::string render() const;

  friend bool operator==(const ContextTag&, const ContextTag&);

 private:
  bool empty_ = true;
  NonterminalSet conds_;
  char last_ = 0;
};

/// Parses the canonical rendering of a nonterminal (plain identifier,
/// bracketed triple or conditional triple, braced powerset).
Nonterminal parse_nonterminal(std::string_view text);

bool is_plain_identifier(std::string_view text);

using Symbol = std::variant<Terminal, Nonterminal>;

inline bool is_terminal(const Symbol& s) { return std::holds_alternative<Terminal>(s); }
inline bool is_nonterminal(const Symbol& s) { return std::holds_alternative<Nonterminal>(s); }
inline char terminal_of(const Symbol& s) { return std::get<Terminal>(s).ch; }
inline const Nonterminal& nonterminal_of(const Symbol& s) { return std::get<Nonterminal>(s); }

std::string render_symbol(const Symbol& s);

}  // namespace ctxgram

template <>
struct std::hash<ctxgram::Nonterminal> {
  size_t operator()(const ctxgram::Nonterminal& n) const noexcept {
    return std::hash<std::string>{}(n.name());
  }
};
