#include "ctxgram/recognizer.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <map>
#include <random>
#include <tuple>
#include <unordered_map>

namespace ctxgram {

namespace detail {

struct CompiledRule {
  int head;
  std::vector<int> base, proper, extended;  // body ids
};

/// Grammar with symbols and conjunct bodies replaced by dense indices.
/// Terminals come first, then nonterminals.
class CompiledGrammar {
 public:
  explicit CompiledGrammar(const Grammar& g) {
    terminal_id_.fill(-1);
    for (char c : g.alphabet()) {
      terminal_id_[static_cast<unsigned char>(c)] = static_cast<int>(symbols_.size());
      symbols_.push_back(Terminal{c});
    }
    for (const auto& n : g.nonterminals()) {
      nonterminal_id_.emplace(n, static_cast<int>(symbols_.size()));
      symbols_.push_back(n);
    }
    start_ = nonterminal_id_.at(g.start());

    std::map<std::vector<int>, int> body_index;
    auto intern = [&](const std::vector<Symbol>& body) {
      std::vector<int> ids;
      ids.reserve(body.size());
      for (const auto& s : body) ids.push_back(id_of(s));
      auto [it, inserted] = body_index.emplace(ids, static_cast<int>(bodies_.size()));
      if (inserted) bodies_.push_back(std::move(ids));
      return it->second;
    };
    for (const auto& r : g.rules()) {
      CompiledRule cr{nonterminal_id_.at(r.head()), {}, {}, {}};
      for (const auto& c : r.conjuncts()) {
        int b = intern(c.body);
        if (c.kind == ConjunctKind::Base) cr.base.push_back(b);
        if (c.kind == ConjunctKind::ProperContext) cr.proper.push_back(b);
        if (c.kind == ConjunctKind::ExtendedContext) cr.extended.push_back(b);
      }
      rules_.push_back(std::move(cr));
    }

    // Proper-context bodies get a slot in the per-position prefix table.
    context_slot_.assign(bodies_.size(), -1);
    for (const auto& r : rules_)
      for (int b : r.proper)
        if (context_slot_[b] < 0) context_slot_[b] = num_context_slots_++;

    // Symbols that may derive the empty string somewhere (contexts ignored,
    // so this over-approximates).
    std::vector<bool> nullable(symbols_.size(), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : rules_) {
        if (nullable[r.head]) continue;
        bool all = std::all_of(r.base.begin(), r.base.end(), [&](int b) {
          return std::all_of(bodies_[b].begin(), bodies_[b].end(),
                             [&](int s) { return nullable[s]; });
        });
        if (all) nullable[r.head] = changed = true;
      }
    }
    // Bodies of length >= 2 are split into pairs X . rest, where rest is a
    // symbol or another pair. Refs below num_symbols() are symbols, the rest
    // pairs; inner pairs get smaller ids.
    std::map<std::pair<int, int>, int> pair_index;
    auto make_pair_ref = [&](int left, int right) {
      auto [it, inserted] = pair_index.emplace(std::make_pair(left, right), static_cast<int>(pairs_.size()));
      if (inserted) pairs_.push_back({left, right});
      return static_cast<int>(symbols_.size()) + it->second;
    };
    body_ref_.resize(bodies_.size());
    for (size_t b = 0; b < bodies_.size(); ++b) {
      const auto& body = bodies_[b];
      if (body.empty()) {
        body_ref_[b] = -1;
        continue;
      }
      int ref = body.back();
      for (size_t q = body.size() - 1; q-- > 0;) ref = make_pair_ref(body[q], ref);
      body_ref_[b] = ref;
    }
    nullable_.assign(symbols_.size() + pairs_.size(), false);
    for (size_t s = 0; s < symbols_.size(); ++s) nullable_[s] = nullable[s];
    for (size_t p = 0; p < pairs_.size(); ++p)
      nullable_[symbols_.size() + p] = nullable_[pairs_[p].left] && nullable_[pairs_[p].right];

    // A symbol derived at (i, j) can enable another item at the same (i, j)
    // when used as a unit body or next to a nullable partner.
    reentrant_.assign(symbols_.size(), false);
    for (const auto& r : rules_)
      for (int b : r.base)
        if (body_ref_[b] >= 0 && body_ref_[b] < static_cast<int>(symbols_.size()))
          reentrant_[body_ref_[b]] = true;
    for (const auto& pr : pairs_) {
      if (nullable_[pr.right]) reentrant_[pr.left] = true;
      if (nullable_[pr.left] && pr.right < static_cast<int>(symbols_.size())) reentrant_[pr.right] = true;
    }
  }

  int id_of(const Symbol& s) const {
    if (is_terminal(s)) {
      int id = terminal_id_[static_cast<unsigned char>(terminal_of(s))];
      if (id < 0) throw InputError(std::string("symbol '") + terminal_of(s) + "' not in alphabet");
      return id;
    }
    auto it = nonterminal_id_.find(nonterminal_of(s));
    if (it == nonterminal_id_.end())
      throw InputError("unknown nonterminal " + nonterminal_of(s).name());
    return it->second;
  }
  std::optional<int> find(const Symbol& s) const {
    if (is_terminal(s)) {
      int id = terminal_id_[static_cast<unsigned char>(terminal_of(s))];
      return id < 0 ? std::nullopt : std::optional<int>(id);
    }
    auto it = nonterminal_id_.find(nonterminal_of(s));
    return it == nonterminal_id_.end() ? std::nullopt : std::optional<int>(it->second);
  }
  int terminal_id(char c) const { return terminal_id_[static_cast<unsigned char>(c)]; }

  size_t num_symbols() const { return symbols_.size(); }
  const Symbol& symbol(int id) const { return symbols_[id]; }
  int start() const { return start_; }
  const std::vector<CompiledRule>& rules() const { return rules_; }
  const std::vector<int>& body(int b) const { return bodies_[b]; }
  size_t num_bodies() const { return bodies_.size(); }
  int context_slot(int b) const { return context_slot_[b]; }
  int num_context_slots() const { return num_context_slots_; }
  struct Pair {
    int left, right;
  };
  const std::vector<Pair>& pairs() const { return pairs_; }
  int body_ref(int b) const { return body_ref_[b]; }
  bool reentrant(int s) const { return reentrant_[s]; }

 private:
  std::array<int, 256> terminal_id_{};
  std::map<Nonterminal, int> nonterminal_id_;
  std::vector<Symbol> symbols_;
  int start_ = 0;
  std::vector<std::vector<int>> bodies_;
  std::vector<CompiledRule> rules_;
  std::vector<int> context_slot_;
  int num_context_slots_ = 0;
  std::vector<Pair> pairs_;
  std::vector<int> body_ref_;
  std::vector<bool> nullable_;
  std::vector<bool> reentrant_;
};

using Word = uint64_t;

/// Incremental chart computation over an input of bounded length: columns
/// (end positions) are added and removed one at a time.
class ChartEngine {
 public:
  ChartEngine(std::shared_ptr<const CompiledGrammar> g, size_t capacity)
      : g_(std::move(g)),
        cap_(capacity),
        words_((capacity + 1 + 63) / 64),
        cells_(g_->num_symbols() * (cap_ + 1) * words_, 0),
        rows_(g_->num_symbols() * (cap_ + 1) * words_, 0),
        row_hi_(g_->num_symbols() * (cap_ + 1), -1),
        pair_cols_(g_->pairs().size() * words_, 0),
        col_lo_(g_->num_symbols() + g_->pairs().size(), 0),
        prefix_(static_cast<size_t>(g_->num_context_slots()) * words_, 0),
        back_(g_->num_bodies() * words_, 0),
        back_valid_(g_->num_bodies(), 0),
        tmp_(words_, 0),
        acc_(words_, 0) {}

  size_t length() const { return input_.size(); }
  const std::string& input() const { return input_; }

  void set_options(const DeriveOptions& o) {
    opts_ = o;
    if (o.shuffle_seed) rng_.seed(*o.shuffle_seed);
  }

  /// Column 0 (empty prefix).
  void init() {
    std::fill(cells_.begin(), cells_.end(), 0);
    std::fill(rows_.begin(), rows_.end(), 0);
    std::fill(row_hi_.begin(), row_hi_.end(), -1);
    std::fill(prefix_.begin(), prefix_.end(), 0);
    input_.clear();
    close_column(0);
  }

  void push(char c) {
    int t = g_->terminal_id(c);
    if (t < 0) throw InputError(std::string("symbol '") + c + "' not in alphabet");
    if (input_.size() >= cap_) throw std::logic_error("chart capacity exceeded");
    input_.push_back(c);
    size_t j = input_.size();
    add_item(t, j - 1, j);  // axiom: (c, j-1, j)
    close_column(j);
  }

  void pop() {
    size_t j = input_.size();
    for (size_t s = 0; s < g_->num_symbols(); ++s) {
      int sym = static_cast<int>(s);
      std::fill_n(cell(sym, j), words_, 0);
      for (size_t i = 0; i <= j; ++i) {
        Word* row = row_of(sym, i);
        clear_bit(row, j);
        long& hi = row_hi_[s * (cap_ + 1) + i];
        if (hi == static_cast<long>(j)) {
          hi = -1;
          for (size_t m = j; m-- > i;)
            if (test_bit(row, m)) {
              hi = static_cast<long>(m);
              break;
            }
        }
      }
    }
    for (int k = 0; k < g_->num_context_slots(); ++k) clear_bit(&prefix_[k * words_], j);
    input_.pop_back();
  }

  /// Whole-input computation with the naive global schedule.
  void run_global(std::string_view w) {
    std::fill(cells_.begin(), cells_.end(), 0);
    input_.assign(w);
    for (size_t j = 1; j <= w.size(); ++j) {
      int t = g_->terminal_id(w[j - 1]);
      if (t < 0) throw InputError(std::string("symbol '") + w[j - 1] + "' not in alphabet");
      set_bit(cell(t, j), j - 1);
    }
    std::vector<int> order(g_->rules().size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    for (bool changed = true; changed;) {
      changed = false;
      if (opts_.shuffle_seed) std::shuffle(order.begin(), order.end(), rng_);
      for (size_t j = 0; j <= w.size(); ++j) {
        std::fill(back_valid_.begin(), back_valid_.end(), 0);
        for (int k : order) changed |= apply_rule(k, j, /*global=*/true);
      }
    }
  }

  bool has(int sym, size_t i, size_t j) const { return test_bit(cell(sym, j), i); }

  Chart snapshot(std::shared_ptr<const CompiledGrammar> g) const {
    Chart c;
    c.input_ = input_;
    c.grammar_ = std::move(g);
    c.capacity_ = cap_;
    c.words_ = words_;
    c.cells_ = cells_;
    return c;
  }

 private:
  std::shared_ptr<const CompiledGrammar> g_;
  size_t cap_, words_;
  std::string input_;
  std::vector<Word> cells_;   // [sym][j] bitset over i
  std::vector<Word> rows_;    // [sym][i] bitset over j
  std::vector<long> row_hi_;  // [sym][i] largest j in the row, -1 if none
  std::vector<Word> pair_cols_;  // [pair] bitset over i, current column only
  std::vector<size_t> col_lo_;   // [ref] smallest i in the current column
  std::vector<Word> prefix_;  // [context slot] bitset over positions p: body holds on (0, p)
  std::vector<Word> back_;    // [body] cached start sets for the current column
  std::vector<char> back_valid_;
  std::vector<Word> tmp_, acc_;
  DeriveOptions opts_;
  std::mt19937_64 rng_;
  std::vector<size_t> order_;
  bool prefix_missed_ = false;

  Word* cell(int sym, size_t j) { return &cells_[(static_cast<size_t>(sym) * (cap_ + 1) + j) * words_]; }
  const Word* cell(int sym, size_t j) const {
    return &cells_[(static_cast<size_t>(sym) * (cap_ + 1) + j) * words_];
  }
  Word* row_of(int sym, size_t i) { return &rows_[(static_cast<size_t>(sym) * (cap_ + 1) + i) * words_]; }
  Word* pair_col(int p) { return &pair_cols_[static_cast<size_t>(p) * words_]; }

  void add_item(int sym, size_t i, size_t j) {
    set_bit(cell(sym, j), i);
    set_bit(row_of(sym, i), j);
    long& hi = row_hi_[static_cast<size_t>(sym) * (cap_ + 1) + i];
    hi = std::max(hi, static_cast<long>(j));
  }

  static void set_bit(Word* b, size_t i) { b[i / 64] |= Word{1} << (i % 64); }
  static void clear_bit(Word* b, size_t i) { b[i / 64] &= ~(Word{1} << (i % 64)); }
  static bool test_bit(const Word* b, size_t i) { return (b[i / 64] >> (i % 64)) & 1; }

  /// Start positions i such that the body derives w[i..j].
  const Word* back(int body, size_t j) {
    Word* out = &back_[static_cast<size_t>(body) * words_];
    if (back_valid_[body]) return out;
    back_valid_[body] = 1;
    const auto& syms = g_->body(body);
    std::fill_n(out, words_, 0);
    set_bit(out, j);
    for (size_t q = syms.size(); q-- > 0;) {
      std::fill(acc_.begin(), acc_.end(), 0);
      bool any = false;
      for (size_t w = 0; w < words_; ++w) {
        Word bits = out[w];
        while (bits) {
          size_t m = w * 64 + static_cast<size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          const Word* src = cell(syms[q], m);
          for (size_t x = 0; x < words_; ++x) {
            acc_[x] |= src[x];
            any |= src[x] != 0;
          }
        }
      }
      std::copy(acc_.begin(), acc_.end(), out);
      if (!any) break;
    }
    return out;
  }

  /// Whether the proper-context body holds on (0, p), for p <= j.
  bool context_holds(int body, size_t p, size_t j, bool global) {
    if (global || p == j) {
      if (p == j) return test_bit(back(body, j), 0);
      // Global schedule: evaluate directly; context chains always start at 0.
      std::vector<char> saved(back_valid_.begin(), back_valid_.end());
      std::vector<Word> saved_back(back_.begin(), back_.end());
      std::fill(back_valid_.begin(), back_valid_.end(), 0);
      bool r = test_bit(back(body, p), 0);
      back_valid_.swap(saved);
      back_.swap(saved_back);
      return r;
    }
    return test_bit(&prefix_[static_cast<size_t>(g_->context_slot(body)) * words_], p);
  }

  bool apply_rule(int k, size_t j, bool global) {
    const CompiledRule& r = g_->rules()[k];
    // Candidate starts 0..j.
    std::fill(tmp_.begin(), tmp_.end(), 0);
    for (size_t i = 0; i <= j; ++i) set_bit(tmp_.data(), i);
    for (int b : r.base) {
      const Word* s = back(b, j);
      bool any = false;
      for (size_t w = 0; w < words_; ++w) any |= (tmp_[w] &= s[w]) != 0;
      if (!any) return false;
    }
    for (int b : r.extended)
      if (!test_bit(back(b, j), 0)) return false;
    for (int b : r.proper) {
      bool any = false;
      for (size_t i = 0; i <= j; ++i) {
        if (!test_bit(tmp_.data(), i)) continue;
        if (context_holds(b, i, j, global))
          any = true;
        else
          clear_bit(tmp_.data(), i);
      }
      if (!any) return false;
    }
    Word* dst = cell(r.head, j);
    bool added = false;
    for (size_t w = 0; w < words_; ++w) {
      Word fresh = tmp_[w] & ~dst[w];
      if (fresh) {
        dst[w] |= fresh;
        added = true;
      }
    }
    return added;
  }

  // Items ending at the current column j.
  bool holds(int ref, size_t i, size_t j) {
    int ns = static_cast<int>(g_->num_symbols());
    if (ref < 0) return i == j;
    if (ref < ns) return test_bit(cell(ref, j), i);
    return test_bit(pair_col(ref - ns), i);
  }

  // Some m in [i, j] with left(i, m) and right(m, j).
  bool pair_holds(const CompiledGrammar::Pair& pr, size_t i, size_t j) {
    int ns = static_cast<int>(g_->num_symbols());
    long hi = row_hi_[static_cast<size_t>(pr.left) * (cap_ + 1) + i];
    if (hi < 0) return false;
    size_t lo = std::max(i, col_lo_[pr.right]);
    size_t top = std::min(j, static_cast<size_t>(hi));
    if (lo > top) return false;
    const Word* row = row_of(pr.left, i);
    const Word* col = pr.right < ns ? cell(pr.right, j) : pair_col(pr.right - ns);
    for (size_t w = lo / 64; w <= top / 64; ++w)
      if (row[w] & col[w]) return true;
    return false;
  }

  bool rule_holds(const CompiledRule& r, size_t i, size_t j) {
    for (int b : r.base)
      if (!holds(g_->body_ref(b), i, j)) return false;
    for (int b : r.extended)
      if (!holds(g_->body_ref(b), 0, j)) return prefix_missed_ = true, false;
    for (int b : r.proper) {
      if (i == j) {
        if (!holds(g_->body_ref(b), 0, j)) return prefix_missed_ = true, false;
      } else if (!test_bit(&prefix_[static_cast<size_t>(g_->context_slot(b)) * words_], i)) {
        return false;
      }
    }
    return true;
  }

  void close_cell(size_t i, size_t j) {
    int ns = static_cast<int>(g_->num_symbols());
    const auto& pairs = g_->pairs();
    const auto& rules = g_->rules();
    for (bool again = true; again;) {
      again = false;
      for (size_t p = 0; p < pairs.size(); ++p) {
        Word* col = pair_col(static_cast<int>(p));
        if (test_bit(col, i) || !pair_holds(pairs[p], i, j)) continue;
        set_bit(col, i);
        col_lo_[ns + p] = i;
      }
      for (size_t n = 0; n < rules.size(); ++n) {
        size_t k = order_.empty() ? n : order_[n];
        const CompiledRule& r = rules[k];
        if (test_bit(cell(r.head, j), i) || !rule_holds(r, i, j)) continue;
        add_item(r.head, i, j);
        col_lo_[r.head] = i;
        if (g_->reentrant(r.head)) again = true;
      }
    }
  }

  // Context facts on the whole prefix (0, j); a rule may consult them before
  // the sweep reaches i = 0, so the sweep repeats until they settle.
  std::vector<char> prefix_facts(size_t j) {
    std::vector<char> facts;
    for (const auto& r : g_->rules()) {
      for (int b : r.proper) facts.push_back(holds(g_->body_ref(b), 0, j));
      for (int b : r.extended) facts.push_back(holds(g_->body_ref(b), 0, j));
    }
    return facts;
  }

  void close_column(size_t j) {
    int ns = static_cast<int>(g_->num_symbols());
    std::fill(pair_cols_.begin(), pair_cols_.end(), 0);
    std::fill(col_lo_.begin(), col_lo_.end(), cap_ + 1);
    for (int s = 0; s < ns; ++s)
      for (size_t w = 0; w < words_; ++w)
        if (Word bits = cell(s, j)[w]) {
          col_lo_[s] = w * 64 + static_cast<size_t>(std::countr_zero(bits));
          break;
        }
    order_.clear();
    if (opts_.shuffle_seed) {
      order_.resize(g_->rules().size());
      for (size_t k = 0; k < order_.size(); ++k) order_[k] = k;
      std::shuffle(order_.begin(), order_.end(), rng_);
    }
    for (;;) {
      auto before = prefix_facts(j);
      prefix_missed_ = false;
      for (size_t i = j + 1; i-- > 0;) close_cell(i, j);
      if (!prefix_missed_ || prefix_facts(j) == before) break;
    }
    for (size_t b = 0; b < g_->num_bodies(); ++b) {
      int slot = g_->context_slot(static_cast<int>(b));
      if (slot >= 0 && holds(g_->body_ref(static_cast<int>(b)), 0, j)) set_bit(&prefix_[slot * words_], j);
    }
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------

bool Chart::contains(const Symbol& x, size_t i, size_t j) const {
  if (!grammar_ || j > input_.size() || i > j) return false;
  auto id = grammar_->find(x);
  if (!id) return false;
  const uint64_t* c = &cells_[(static_cast<size_t>(*id) * (capacity_ + 1) + j) * words_];
  return (c[i / 64] >> (i % 64)) & 1;
}

std::vector<ChartItem> Chart::items() const {
  std::vector<ChartItem> out;
  if (!grammar_) return out;
  for (size_t s = 0; s < grammar_->num_symbols(); ++s)
    for (size_t j = 0; j <= input_.size(); ++j) {
      const uint64_t* c = &cells_[(s * (capacity_ + 1) + j) * words_];
      for (size_t i = 0; i <= j; ++i)
        if ((c[i / 64] >> (i % 64)) & 1) out.push_back({grammar_->symbol(static_cast<int>(s)), i, j});
    }
  std::sort(out.begin(), out.end());
  return out;
}

size_t Chart::size() const {
  size_t n = 0;
  if (!grammar_) return 0;
  for (size_t s = 0; s < grammar_->num_symbols(); ++s)
    for (size_t j = 0; j <= input_.size(); ++j) {
      const uint64_t* c = &cells_[(s * (capacity_ + 1) + j) * words_];
      for (size_t w = 0; w < words_; ++w) n += static_cast<size_t>(std::popcount(c[w]));
    }
  return n;
}

std::vector<std::pair<size_t, size_t>> Chart::spans(const Nonterminal& x) const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t i = 0; i <= input_.size(); ++i)
    for (size_t j = i; j <= input_.size(); ++j)
      if (contains(x, i, j)) out.emplace_back(i, j);
  return out;
}

Recognizer::Recognizer(const Grammar& g)
    : grammar_(g), compiled_(std::make_shared<detail::CompiledGrammar>(g)) {}
Recognizer::~Recognizer() = default;
Recognizer::Recognizer(Recognizer&&) noexcept = default;
Recognizer& Recognizer::operator=(Recognizer&&) noexcept = default;

Chart Recognizer::chart(std::string_view w, const DeriveOptions& opts) const {
  detail::ChartEngine e(compiled_, w.size());
  e.set_options(opts);
  if (opts.schedule == Schedule::Global) {
    e.run_global(w);
  } else {
    e.init();
    for (char c : w) e.push(c);
  }
  return e.snapshot(compiled_);
}

bool Recognizer::recognize(std::string_view w) const {
  if (w.empty() && grammar_.accepts_epsilon()) return true;
  detail::ChartEngine e(compiled_, w.size());
  e.init();
  for (char c : w) e.push(c);
  return e.has(compiled_->start(), 0, w.size());
}

void Recognizer::for_each_string(
    size_t max_len, const std::function<void(const std::string&, const Chart&)>& visit) const {
  detail::ChartEngine e(compiled_, max_len);
  e.init();
  std::vector<char> alphabet(grammar_.alphabet().begin(), grammar_.alphabet().end());
  std::function<void()> rec = [&]() {
    visit(e.input(), e.snapshot(compiled_));
    if (e.length() == max_len) return;
    for (char c : alphabet) {
      e.push(c);
      rec();
      e.pop();
    }
  };
  rec();
}

std::set<std::string> Recognizer::enumerate(size_t max_len) const {
  std::set<std::string> out;
  detail::ChartEngine e(compiled_, max_len);
  e.init();
  if (grammar_.accepts_epsilon() || e.has(compiled_->start(), 0, 0)) out.insert("");
  std::vector<char> alphabet(grammar_.alphabet().begin(), grammar_.alphabet().end());
  std::function<void()> rec = [&]() {
    if (e.length() == max_len) return;
    for (char c : alphabet) {
      e.push(c);
      if (e.has(compiled_->start(), 0, e.length())) out.insert(e.input());
      rec();
      e.pop();
    }
  };
  rec();
  return out;
}

Chart derive_chart(const Grammar& g, std::string_view w, const DeriveOptions& opts) {
  return Recognizer(g).chart(w, opts);
}

bool recognize(const Grammar& g, std::string_view w) { return Recognizer(g).recognize(w); }

std::set<std::string> enumerate_language(const Grammar& g, size_t max_len) {
  return Recognizer(g).enumerate(max_len);
}

// ---------------------------------------------------------------------------
// Top-down oracle. Deliberately shares nothing with the chart engine.

namespace {

class TopDown {
 public:
  TopDown(const Grammar& g, std::string_view w) : g_(g), w_(w) {
    for (char c : w)
      if (!g.alphabet().count(c)) throw InputError(std::string("symbol '") + c + "' not in alphabet");
    for (const auto& r : g.rules()) by_head_[r.head().name()].push_back(&r);
  }

  bool solve_start() {
    for (;;) {
      size_t before = proven_.size();
      round_.clear();
      bool r = holds(g_.start(), 0, w_.size());
      if (r || proven_.size() == before) return r;
    }
  }

 private:
  using Goal = std::tuple<std::string, size_t, size_t>;
  const Grammar& g_;
  std::string_view w_;
  std::map<std::string, std::vector<const Rule*>> by_head_;
  std::set<Goal> proven_;
  std::map<Goal, bool> round_;
  std::set<Goal> in_progress_;

  bool holds_symbol(const Symbol& s, size_t i, size_t j) {
    if (is_terminal(s)) return j == i + 1 && w_[i] == terminal_of(s);
    return holds(nonterminal_of(s), i, j);
  }

  // Is there a partition of w[i..j] matching body[q..]?
  bool matches(const std::vector<Symbol>& body, size_t q, size_t i, size_t j) {
    if (q == body.size()) return i == j;
    for (size_t k = i; k <= j; ++k)
      if (holds_symbol(body[q], i, k) && matches(body, q + 1, k, j)) return true;
    return false;
  }

  bool holds(const Nonterminal& a, size_t i, size_t j) {
    Goal goal{a.name(), i, j};
    if (proven_.count(goal)) return true;
    if (auto it = round_.find(goal); it != round_.end()) return it->second;
    if (in_progress_.count(goal)) return false;
    in_progress_.insert(goal);
    bool result = false;
    auto it = by_head_.find(a.name());
    if (it != by_head_.end()) {
      for (const Rule* r : it->second) {
        bool ok = true;
        for (const auto& c : r->conjuncts()) {
          if (c.kind == ConjunctKind::Base)
            ok = matches(c.body, 0, i, j);
          else if (c.kind == ConjunctKind::ProperContext)
            ok = matches(c.body, 0, 0, i);
          else
            ok = matches(c.body, 0, 0, j);
          if (!ok) break;
        }
        if (ok) {
          result = true;
          break;
        }
      }
    }
    in_progress_.erase(goal);
    if (result) proven_.insert(goal);
    round_[goal] = result;
    return result;
  }
};

}  // namespace

bool recognize_topdown(const Grammar& g, std::string_view w) {
  TopDown td(g, w);
  if (w.empty() && g.accepts_epsilon()) return true;
  return td.solve_start();
}

}  // namespace ctxgram
