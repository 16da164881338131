#include "ctxgram/text.hpp"

#include <cctype>
#include <optional>

namespace ctxgram {

namespace {

struct Piece {
  std::string_view text;
  size_t column;  // 1-based column of text[0]
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

Piece trim(Piece p) {
  size_t b = 0, e = p.text.size();
  while (b < e && is_space(p.text[b])) ++b;
  while (e > b && is_space(p.text[e - 1])) --e;
  return {p.text.substr(b, e - b), p.column + b};
}

// Splits on `sep` outside brackets and braces.
std::vector<Piece> split_top(Piece p, char sep, size_t line) {
  std::vector<Piece> out;
  int depth = 0;
  size_t begin = 0;
  for (size_t k = 0; k < p.text.size(); ++k) {
    char c = p.text[k];
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') {
      if (--depth < 0) throw SyntaxError(line, p.column + k, "unbalanced bracket");
    }
    if (c == sep && depth == 0) {
      out.push_back({p.text.substr(begin, k - begin), p.column + begin});
      begin = k + 1;
    }
  }
  if (depth != 0) throw SyntaxError(line, p.column + p.text.size(), "unbalanced bracket");
  out.push_back({p.text.substr(begin), p.column + begin});
  return out;
}

std::vector<Piece> split_ws(Piece p) {
  std::vector<Piece> out;
  size_t k = 0;
  while (k < p.text.size()) {
    while (k < p.text.size() && is_space(p.text[k])) ++k;
    size_t b = k;
    while (k < p.text.size() && !is_space(p.text[k])) ++k;
    if (k > b) out.push_back({p.text.substr(b, k - b), p.column + b});
  }
  return out;
}

Nonterminal parse_nt_token(Piece tok, size_t line) {
  try {
    return parse_nonterminal(tok.text);
  } catch (const IdentifierError& e) {
    throw SyntaxError(line, tok.column, e.what());
  }
}

Symbol parse_symbol_token(Piece tok, size_t line) {
  char c = tok.text[0];
  if (c == '[' || c == '{' || (c >= 'A' && c <= 'Z')) return parse_nt_token(tok, line);
  if (tok.text.size() == 1 && is_terminal_char(c)) return Terminal{c};
  throw SyntaxError(line, tok.column, "invalid symbol '" + std::string(tok.text) + "'");
}

Conjunct parse_conjunct(Piece p, size_t line) {
  p = trim(p);
  if (p.text.empty()) throw SyntaxError(line, p.column, "empty conjunct");
  ConjunctKind kind = ConjunctKind::Base;
  if (p.text.starts_with("<=")) {
    kind = ConjunctKind::ExtendedContext;
    p = trim({p.text.substr(2), p.column + 2});
  } else if (p.text.starts_with("<")) {
    kind = ConjunctKind::ProperContext;
    p = trim({p.text.substr(1), p.column + 1});
  }
  if (p.text.empty()) throw SyntaxError(line, p.column, "missing context body");
  std::vector<Symbol> body;
  auto toks = split_ws(p);
  if (toks.size() == 1 && toks[0].text == "_") return {kind, {}};
  for (const auto& t : toks) {
    if (t.text == "_") throw SyntaxError(line, t.column, "'_' must stand alone");
    body.push_back(parse_symbol_token(t, line));
  }
  return {kind, std::move(body)};
}

}  // namespace

Grammar parse_grammar_text(std::string_view text) {
  struct PendingRule {
    Nonterminal head;
    std::vector<Conjunct> conjuncts;
    size_t line, column;
  };
  std::vector<PendingRule> pending;
  std::optional<Nonterminal> start;
  std::set<char> alphabet;
  NonterminalSet declared;
  bool accepts_epsilon = false;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    Piece p = trim({line, 1});
    if (p.text.empty()) continue;

    if (p.text[0] == '%') {
      auto toks = split_ws(p);
      auto dir = toks[0].text;
      if (dir == "%start") {
        if (toks.size() != 2) throw SyntaxError(line_no, p.column, "%start takes one symbol");
        start = parse_nt_token(toks[1], line_no);
        declared.insert(*start);
      } else if (dir == "%alphabet") {
        for (size_t k = 1; k < toks.size(); ++k) {
          if (toks[k].text.size() != 1 || !is_terminal_char(toks[k].text[0]))
            throw SyntaxError(line_no, toks[k].column, "invalid terminal");
          alphabet.insert(toks[k].text[0]);
        }
      } else if (dir == "%nonterminals") {
        for (size_t k = 1; k < toks.size(); ++k) declared.insert(parse_nt_token(toks[k], line_no));
      } else {
        throw SyntaxError(line_no, p.column, "unknown directive " + std::string(dir));
      }
      continue;
    }

    size_t arrow = std::string_view::npos;
    {
      int depth = 0;
      for (size_t k = 0; k + 1 < p.text.size(); ++k) {
        char c = p.text[k];
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
        if (depth == 0 && c == '-' && p.text[k + 1] == '>') {
          arrow = k;
          break;
        }
      }
    }
    if (arrow == std::string_view::npos) throw SyntaxError(line_no, p.column, "expected '->'");
    Piece head_piece = trim({p.text.substr(0, arrow), p.column});
    if (head_piece.text.empty()) throw SyntaxError(line_no, p.column, "missing rule head");
    Nonterminal head = parse_nt_token(head_piece, line_no);
    if (!start) start = head;
    Piece rhs{p.text.substr(arrow + 2), p.column + arrow + 2};
    for (const Piece& alt : split_top(rhs, '|', line_no)) {
      std::vector<Conjunct> conjuncts;
      for (const Piece& cp : split_top(alt, '&', line_no))
        conjuncts.push_back(parse_conjunct(cp, line_no));
      bool has_base = false;
      for (const auto& c : conjuncts) has_base |= c.kind == ConjunctKind::Base;
      if (!has_base)
        throw SyntaxError(line_no, trim(alt).column, "rule has no base conjunct");
      pending.push_back({head, std::move(conjuncts), line_no, trim(alt).column});
    }
  }
  if (!start) throw SyntaxError(line_no, 1, "grammar has no rules and no %start");

  std::vector<Rule> rules;
  std::vector<size_t> rule_lines;
  NonterminalSet heads;
  for (auto& pr : pending) {
    if (pr.head == *start && pr.conjuncts.size() == 1 &&
        pr.conjuncts[0].kind == ConjunctKind::Base && pr.conjuncts[0].body.empty()) {
      accepts_epsilon = true;
      heads.insert(pr.head);
      continue;
    }
    heads.insert(pr.head);
    rules.emplace_back(pr.head, std::move(pr.conjuncts));
    rule_lines.push_back(pr.line);
  }
  NonterminalSet nts = declared;
  nts.insert(heads.begin(), heads.end());
  nts.insert(*start);
  for (size_t k = 0; k < rules.size(); ++k)
    for (const auto& c : rules[k].conjuncts())
      for (const auto& s : c.body) {
        if (is_terminal(s)) {
          alphabet.insert(terminal_of(s));
        } else if (!nts.count(nonterminal_of(s))) {
          throw SyntaxError(rule_lines[k], 1,
                            "undeclared nonterminal " + nonterminal_of(s).name() + " in " +
                                render_rule(rules[k]));
        }
      }
  return Grammar(std::move(alphabet), std::move(nts), std::move(rules), *start, accepts_epsilon);
}

std::string render_grammar_text(const Grammar& g) {
  std::string out;
  std::set<char> used;
  NonterminalSet heads;
  for (const auto& r : g.rules()) {
    heads.insert(r.head());
    for (const auto& c : r.conjuncts())
      for (const auto& s : c.body)
        if (is_terminal(s)) used.insert(terminal_of(s));
  }
  bool start_first = g.accepts_epsilon() || (!g.rules().empty() && g.rules()[0].head() == g.start());
  if (!start_first) out += "%start " + g.start().name() + "\n";
  if (used != g.alphabet()) {
    out += "%alphabet";
    for (char c : g.alphabet()) {
      out += ' ';
      out += c;
    }
    out += '\n';
  }
  std::string ruleless;
  for (const auto& n : g.nonterminals())
    if (!heads.count(n) && n != g.start()) ruleless += " " + n.name();
  if (!ruleless.empty()) out += "%nonterminals" + ruleless + "\n";
  if (g.accepts_epsilon()) out += g.start().name() + " -> _\n";
  for (const auto& r : g.rules()) out += render_rule(r) + "\n";
  return out;
}

}  // namespace ctxgram
