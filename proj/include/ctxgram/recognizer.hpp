#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctxgram/grammar.hpp"

namespace ctxgram {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Proposition X(w[0..i] <w[i..j]>): the substring w[i..j] in left context
/// w[0..i] has property X.
struct ChartItem {
  Symbol symbol;
  size_t i = 0;
  size_t j = 0;

  friend bool operator==(const ChartItem&, const ChartItem&) = default;
  friend auto operator<=>(const ChartItem&, const ChartItem&) = default;
};

namespace detail {
class CompiledGrammar;
class ChartEngine;
}  // namespace detail

/// Least set of items closed under the deduction rules, for one input.
class Chart {
 public:
  const std::string& input() const { return input_; }
  bool contains(const Symbol& x, size_t i, size_t j) const;
  bool contains(const Nonterminal& x, size_t i, size_t j) const { return contains(Symbol{x}, i, j); }
  /// All items, sorted.
  std::vector<ChartItem> items() const;
  size_t size() const;
  /// Items of one nonterminal as (i, j) pairs.
  std::vector<std::pair<size_t, size_t>> spans(const Nonterminal& x) const;

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.input_ == b.input_ && a.items() == b.items();
  }

 private:
  friend class Recognizer;
  friend class detail::ChartEngine;
  std::string input_;
  std::shared_ptr<const detail::CompiledGrammar> grammar_;
  size_t capacity_ = 0;  // positions 0..capacity_ are laid out
  size_t words_ = 0;
  std::vector<uint64_t> cells_;  // [symbol][j][word] -> bitset over start positions i
};

enum class Schedule {
  /// Close each end position in turn; items ending at j only depend on items
  /// ending at or before j.
  ByEnd,
  /// Naive global re-scan of all (A, i, j) candidates until nothing changes.
  Global,
};

struct DeriveOptions {
  Schedule schedule = Schedule::ByEnd;
  /// Shuffle the rule processing order in every pass.
  std::optional<uint64_t> shuffle_seed;
};

/// A grammar compiled once for repeated chart computations.
class Recognizer {
 public:
  explicit Recognizer(const Grammar& g);
  ~Recognizer();
  Recognizer(Recognizer&&) noexcept;
  Recognizer& operator=(Recognizer&&) noexcept;

  Chart chart(std::string_view w, const DeriveOptions& opts = {}) const;
  bool recognize(std::string_view w) const;
  /// All strings over the alphabet of length <= max_len in the language.
  std::set<std::string> enumerate(size_t max_len) const;
  /// Calls visit(w, chart-view) for every string of length <= max_len over the
  /// alphabet, sharing work between strings with a common prefix.
  void for_each_string(size_t max_len,
                       const std::function<void(const std::string&, const Chart&)>& visit) const;

  const Grammar& grammar() const { return grammar_; }

 private:
  Grammar grammar_;
  std::shared_ptr<const detail::CompiledGrammar> compiled_;
};

Chart derive_chart(const Grammar& g, std::string_view w, const DeriveOptions& opts = {});
bool recognize(const Grammar& g, std::string_view w);
/// Independent oracle: memoized goal-directed search; goals in progress count
/// as false and the search is repeated until no new goal is proven.
bool recognize_topdown(const Grammar& g, std::string_view w);
std::set<std::string> enumerate_language(const Grammar& g, size_t max_len);

}  // namespace ctxgram
