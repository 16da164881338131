#include "ctxgram/symbol.hpp"

#include <cctype>

namespace ctxgram {

bool is_terminal_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '#';
}

static bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_plain_identifier(std::string_view text) {
  if (text.empty() || !(text[0] >= 'A' && text[0] <= 'Z')) return false;
  for (char c : text)
    if (!is_identifier_char(c)) return false;
  return true;
}

struct Nonterminal::Node {
  Kind kind = Kind::Plain;
  std::string key;
  std::optional<char> left, right;
  std::optional<Nonterminal> base;
  ContextTag ctx;
  NonterminalSet pending;
  NonterminalSet members;
};

namespace {

std::string render_slot(std::optional<char> c) {
  if (!c) return "e";
  if (*c == 'e') return "'e'";
  return std::string(1, *c);
}

std::string render_set(const NonterminalSet& set) {
  std::string out = "{";
  bool first = true;
  for (const auto& n : set) {
    if (!first) out += ',';
    out += n.name();
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace

ContextTag ContextTag::empty_context() { return ContextTag{}; }

ContextTag ContextTag::conditions(NonterminalSet conds, char last) {
  if (!is_terminal_char(last))
    throw IdentifierError(std::string("invalid context symbol '") + last + "'");
  ContextTag t;
  t.empty_ = false;
  t.conds_ = std::move(conds);
  t.last_ = last;
  return t;
}

std::string ContextTag::render() const {
  if (empty_) return "{e}";
  return render_set(conds_) + last_;
}

bool operator==(const ContextTag& a, const ContextTag& b) {
  return a.empty_ == b.empty_ && a.last_ == b.last_ && a.conds_ == b.conds_;
}

Nonterminal Nonterminal::plain(std::string name) {
  if (!is_plain_identifier(name)) throw IdentifierError("invalid nonterminal name '" + name + "'");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Plain;
  node->key = std::move(name);
  return Nonterminal(std::move(node));
}

Nonterminal Nonterminal::triple(std::optional<char> left, const Nonterminal& base,
                                std::optional<char> right) {
  if ((left && !is_terminal_char(*left)) || (right && !is_terminal_char(*right)))
    throw IdentifierError("invalid terminal in triple");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Triple;
  node->left = left;
  node->right = right;
  node->base = base;
  node->key = "[" + render_slot(left) + "|" + base.name() + "|" + render_slot(right) + "]";
  return Nonterminal(std::move(node));
}

Nonterminal Nonterminal::conditional(ContextTag ctx, const Nonterminal& base,
                                     NonterminalSet pending) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Conditional;
  node->base = base;
  node->key = "[" + ctx.render() + "|" + base.name() + "|" + render_set(pending) + "]";
  node->ctx = std::move(ctx);
  node->pending = std::move(pending);
  return Nonterminal(std::move(node));
}

Nonterminal Nonterminal::powerset(NonterminalSet members) {
  if (members.empty()) throw IdentifierError("powerset nonterminal needs at least one member");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Powerset;
  node->key = render_set(members);
  node->members = std::move(members);
  return Nonterminal(std::move(node));
}

Nonterminal::Kind Nonterminal::kind() const { return node_->kind; }
const std::string& Nonterminal::name() const { return node_->key; }
std::optional<char> Nonterminal::left() const { return node_->left; }
std::optional<char> Nonterminal::right() const { return node_->right; }

const Nonterminal& Nonterminal::base() const {
  if (!node_->base) throw std::logic_error("nonterminal " + name() + " has no base");
  return *node_->base;
}

const ContextTag& Nonterminal::context() const { return node_->ctx; }
const NonterminalSet& Nonterminal::pending() const { return node_->pending; }
const NonterminalSet& Nonterminal::members() const { return node_->members; }

namespace {

class IdParser {
 public:
  explicit IdParser(std::string_view s) : s_(s) {}

  Nonterminal parse_all() {
    Nonterminal n = parse();
    if (pos_ != s_.size()) fail("trailing characters");
    return n;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw IdentifierError("bad nonterminal '" + std::string(s_) + "' at offset " +
                          std::to_string(pos_) + ": " + what);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Nonterminal parse() {
    char c = peek();
    if (c == '[') {
      ++pos_;
      if (peek() == '{') return parse_conditional_rest();
      return parse_triple_rest();
    }
    if (c == '{') return Nonterminal::powerset(parse_set());
    if (c >= 'A' && c <= 'Z') {
      size_t begin = pos_;
      while (pos_ < s_.size() && is_identifier_char(s_[pos_])) ++pos_;
      return Nonterminal::plain(std::string(s_.substr(begin, pos_ - begin)));
    }
    fail("expected nonterminal");
  }

  std::optional<char> parse_slot() {
    char c = peek();
    if (c == '\'') {
      ++pos_;
      char t = peek();
      if (!is_terminal_char(t)) fail("expected quoted terminal");
      ++pos_;
      expect('\'');
      return t;
    }
    if (c == 'e') {
      ++pos_;
      return std::nullopt;
    }
    if (!is_terminal_char(c)) fail("expected terminal or 'e'");
    ++pos_;
    return c;
  }

  Nonterminal parse_triple_rest() {
    auto left = parse_slot();
    expect('|');
    Nonterminal base = parse();
    expect('|');
    auto right = parse_slot();
    expect(']');
    return Nonterminal::triple(left, base, right);
  }

  NonterminalSet parse_set() {
    expect('{');
    NonterminalSet out;
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    for (;;) {
      out.insert(parse());
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return out;
    }
  }

  Nonterminal parse_conditional_rest() {
    ContextTag ctx;
    if (s_.substr(pos_, 3) == "{e}") {
      pos_ += 3;
      ctx = ContextTag::empty_context();
    } else {
      NonterminalSet conds = parse_set();
      char last = peek();
      if (!is_terminal_char(last)) fail("expected context symbol");
      ++pos_;
      ctx = ContextTag::conditions(std::move(conds), last);
    }
    expect('|');
    Nonterminal base = parse();
    expect('|');
    NonterminalSet pending = parse_set();
    expect(']');
    return Nonterminal::conditional(std::move(ctx), base, std::move(pending));
  }
};

}  // namespace

Nonterminal parse_nonterminal(std::string_view text) { return IdParser(text).parse_all(); }

std::string render_symbol(const Symbol& s) {
  if (is_terminal(s)) return std::string(1, terminal_of(s));
  return nonterminal_of(s).name();
}

}  // namespace ctxgram
