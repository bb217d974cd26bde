#pragma once

// LTL formula AST with structural hashing, the ASCII concrete grammar
// (parser + printer), negation normal form, and the syntactic co-safety
// check. See docs/grammar.md for the grammar reference.
//
// Nodes are immutable and shared; all operations here are pure, so
// formulas can be used concurrently without synchronization.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tlgcs/errors.hpp"

namespace tlgcs {

enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Next,
  Until,
  Eventually,
  Always,
};

inline int op_arity(Op op) {
  switch (op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return 0;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return 1;
    case Op::And:
    case Op::Or:
    case Op::Until:
      return 2;
  }
  return 0;
}

class Formula {
  struct Node;
  using Ptr = std::shared_ptr<const Node>;

  struct Node {
    Op op;
    std::string atom;  // Op::Atom only
    Ptr lhs, rhs;
    std::size_t hash;
  };

 public:
  Formula() = default;

  static Formula tru() { return make(Op::True, "", nullptr, nullptr); }
  static Formula fls() { return make(Op::False, "", nullptr, nullptr); }
  static Formula atom(const std::string& name) {
    if (name.empty()) throw Error("atom name must be nonempty");
    return make(Op::Atom, name, nullptr, nullptr);
  }
  static Formula negation(const Formula& f) { return make(Op::Not, "", f.node_, nullptr); }
  static Formula conj(const Formula& a, const Formula& b) { return make(Op::And, "", a.node_, b.node_); }
  static Formula disj(const Formula& a, const Formula& b) { return make(Op::Or, "", a.node_, b.node_); }
  static Formula next(const Formula& f) { return make(Op::Next, "", f.node_, nullptr); }
  static Formula until(const Formula& a, const Formula& b) { return make(Op::Until, "", a.node_, b.node_); }
  static Formula eventually(const Formula& f) { return make(Op::Eventually, "", f.node_, nullptr); }
  static Formula always(const Formula& f) { return make(Op::Always, "", f.node_, nullptr); }

  explicit operator bool() const { return node_ != nullptr; }
  Op op() const { return node_->op; }
  const std::string& atom_name() const { return node_->atom; }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }
  std::size_t hash() const { return node_->hash; }

  // Structural equality (hash-consistent by construction).
  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.node_->hash != b.node_->hash) return false;
    return compare(a, b) == 0;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  // Deterministic total order, used to canonicalize conjunct/disjunct lists.
  static int compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return 0;
    if (!a.node_) return b.node_ ? -1 : 0;
    if (!b.node_) return 1;
    if (a.node_->op != b.node_->op) return a.node_->op < b.node_->op ? -1 : 1;
    if (a.node_->op == Op::Atom) return a.node_->atom.compare(b.node_->atom);
    const int arity = op_arity(a.node_->op);
    if (arity >= 1) {
      if (int c = compare(a.lhs(), b.lhs()); c != 0) return c;
    }
    if (arity == 2) return compare(a.rhs(), b.rhs());
    return 0;
  }

  // Stable identity for memo tables keyed on subformula occurrences.
  const void* id() const { return node_.get(); }

 private:
  explicit Formula(Ptr p) : node_(std::move(p)) {}

  static Formula make(Op op, std::string atom, Ptr lhs, Ptr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->atom = std::move(atom);
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    std::size_t h = std::hash<int>()(static_cast<int>(op));
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    if (op == Op::Atom) mix(std::hash<std::string>()(n->atom));
    if (n->lhs) mix(n->lhs->hash);
    if (n->rhs) mix(n->rhs->hash);
    n->hash = h;
    return Formula(std::move(n));
  }

  Ptr node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Parser for the concrete grammar. Precedence, tightest first:
// unary (!, X, F, G), U (right-assoc), &, |, ->. `p -> q` desugars to
// `!p | q`. `true` and `false` are keywords; X/U/F/G are reserved and
// cannot be atom names.
// ---------------------------------------------------------------------------

namespace detail {

enum class Tok { Atom, True, False, Not, And, Or, Arrow, Next, Until, Ev, Alw, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Atom: return "atom";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Not: return "'!'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Next: return "'X'";
    case Tok::Until: return "'U'";
    case Tok::Ev: return "'F'";
    case Tok::Alw: return "'G'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> lex_formula(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') { out.push_back({Tok::LParen, "(", i++}); continue; }
    if (c == ')') { out.push_back({Tok::RParen, ")", i++}); continue; }
    if (c == '!') { out.push_back({Tok::Not, "!", i++}); continue; }
    if (c == '&') { out.push_back({Tok::And, "&", i++}); continue; }
    if (c == '|') { out.push_back({Tok::Or, "|", i++}); continue; }
    if (c == '-') {
      if (i + 1 < text.size() && text[i + 1] == '>') {
        out.push_back({Tok::Arrow, "->", i});
        i += 2;
        continue;
      }
      throw ParseError(i, {"'->'"}, "stray '-' at offset " + std::to_string(i));
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      std::string word = text.substr(i, j - i);
      Tok kind = Tok::Atom;
      if (word == "X") kind = Tok::Next;
      else if (word == "U") kind = Tok::Until;
      else if (word == "F") kind = Tok::Ev;
      else if (word == "G") kind = Tok::Alw;
      else if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      out.push_back({kind, std::move(word), i});
      i = j;
      continue;
    }
    throw ParseError(i, {}, std::string("unexpected character '") + c + "' at offset " + std::to_string(i));
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

class FormulaParser {
 public:
  explicit FormulaParser(const std::string& text) : toks_(lex_formula(text)) {}

  Formula parse_all() {
    Formula f = parse_implies();
    if (peek().kind != Tok::End) fail({"'&'", "'|'", "'->'", "'U'", "end of input"});
    return f;
  }

  // First occurrence of each atom, for scenario diagnostics.
  const std::vector<std::pair<std::string, std::size_t>>& atom_offsets() const { return atom_offsets_; }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::ostringstream os;
    os << "syntax error at offset " << t.offset << ": unexpected " << tok_name(t.kind);
    if (!expected.empty()) {
      os << ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? " | " : "") << expected[i];
    }
    throw ParseError(t.offset, std::move(expected), os.str());
  }

  // implies := or ('->' implies)?   desugared right away
  Formula parse_implies() {
    Formula lhs = parse_or();
    if (peek().kind == Tok::Arrow) {
      take();
      Formula rhs = parse_implies();
      return Formula::disj(Formula::negation(lhs), rhs);
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (peek().kind == Tok::Or) {
      take();
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (peek().kind == Tok::And) {
      take();
      f = Formula::conj(f, parse_until());
    }
    return f;
  }

  // until := unary ('U' until)?   right associative
  Formula parse_until() {
    Formula lhs = parse_unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::until(lhs, parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    switch (peek().kind) {
      case Tok::Not: take(); return Formula::negation(parse_unary());
      case Tok::Next: take(); return Formula::next(parse_unary());
      case Tok::Ev: take(); return Formula::eventually(parse_unary());
      case Tok::Alw: take(); return Formula::always(parse_unary());
      default: return parse_primary();
    }
  }

  Formula parse_primary() {
    switch (peek().kind) {
      case Tok::True: take(); return Formula::tru();
      case Tok::False: take(); return Formula::fls();
      case Tok::Atom: {
        Token t = take();
        atom_offsets_.emplace_back(t.text, t.offset);
        return Formula::atom(t.text);
      }
      case Tok::LParen: {
        take();
        Formula f = parse_implies();
        if (peek().kind != Tok::RParen) fail({"')'"});
        take();
        return f;
      }
      default:
        fail({"atom", "'true'", "'false'", "'!'", "'X'", "'F'", "'G'", "'('"});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, std::size_t>> atom_offsets_;
};

}  // namespace detail

inline Formula parse_formula(const std::string& text) {
  return detail::FormulaParser(text).parse_all();
}

// ---------------------------------------------------------------------------
// Printer. Emits the same grammar the parser accepts; parse(print(f)) == f.
// ---------------------------------------------------------------------------

namespace detail {

inline int print_prec(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Until: return 3;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always: return 4;
    default: return 5;  // constants and atoms
  }
}

inline void print_rec(const Formula& f, int min_prec, std::string& out) {
  const int p = print_prec(f.op());
  const bool parens = p < min_prec;
  if (parens) out += '(';
  switch (f.op()) {
    case Op::True: out += "true"; break;
    case Op::False: out += "false"; break;
    case Op::Atom: out += f.atom_name(); break;
    case Op::Not: out += '!'; print_rec(f.lhs(), 4, out); break;
    case Op::Next: out += "X "; print_rec(f.lhs(), 4, out); break;
    case Op::Eventually: out += "F "; print_rec(f.lhs(), 4, out); break;
    case Op::Always: out += "G "; print_rec(f.lhs(), 4, out); break;
    case Op::And:
      print_rec(f.lhs(), 2, out);
      out += " & ";
      print_rec(f.rhs(), 3, out);
      break;
    case Op::Or:
      print_rec(f.lhs(), 1, out);
      out += " | ";
      print_rec(f.rhs(), 2, out);
      break;
    case Op::Until:
      print_rec(f.lhs(), 4, out);
      out += " U ";
      print_rec(f.rhs(), 3, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_rec(f, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Negation normal form. Negations are pushed onto atoms using the usual
// dualities; the Release operator arising from ¬(a U b) is expanded as
// (¬b U (¬a & ¬b)) | G ¬b so the node set stays closed.
// ---------------------------------------------------------------------------

inline Formula to_nnf(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::And: return Formula::conj(to_nnf(f.lhs()), to_nnf(f.rhs()));
    case Op::Or: return Formula::disj(to_nnf(f.lhs()), to_nnf(f.rhs()));
    case Op::Next: return Formula::next(to_nnf(f.lhs()));
    case Op::Until: return Formula::until(to_nnf(f.lhs()), to_nnf(f.rhs()));
    case Op::Eventually: return Formula::eventually(to_nnf(f.lhs()));
    case Op::Always: return Formula::always(to_nnf(f.lhs()));
    case Op::Not: {
      const Formula g = f.lhs();
      switch (g.op()) {
        case Op::True: return Formula::fls();
        case Op::False: return Formula::tru();
        case Op::Atom: return f;
        case Op::Not: return to_nnf(g.lhs());
        case Op::And:
          return Formula::disj(to_nnf(Formula::negation(g.lhs())), to_nnf(Formula::negation(g.rhs())));
        case Op::Or:
          return Formula::conj(to_nnf(Formula::negation(g.lhs())), to_nnf(Formula::negation(g.rhs())));
        case Op::Next: return Formula::next(to_nnf(Formula::negation(g.lhs())));
        case Op::Eventually: return Formula::always(to_nnf(Formula::negation(g.lhs())));
        case Op::Always: return Formula::eventually(to_nnf(Formula::negation(g.lhs())));
        case Op::Until: {
          const Formula x = to_nnf(Formula::negation(g.lhs()));
          const Formula y = to_nnf(Formula::negation(g.rhs()));
          return Formula::disj(Formula::until(y, Formula::conj(x, y)), Formula::always(y));
        }
      }
      break;
    }
  }
  throw Error("to_nnf: malformed formula");
}

// Eq. 2 fragment membership. Precondition: f is in NNF.
inline bool is_syntactically_cosafe(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return true;
    case Op::Not:
      return f.lhs().op() == Op::Atom;
    case Op::And:
    case Op::Or:
    case Op::Until:
      return is_syntactically_cosafe(f.lhs()) && is_syntactically_cosafe(f.rhs());
    case Op::Next:
    case Op::Eventually:
      return is_syntactically_cosafe(f.lhs());
    case Op::Always:
      return false;
  }
  return false;
}

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Atom) {
    out.insert(f.atom_name());
    return;
  }
  const int arity = op_arity(f.op());
  if (arity >= 1) collect_atoms(f.lhs(), out);
  if (arity == 2) collect_atoms(f.rhs(), out);
}

inline std::set<std::string> formula_atoms(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

// Number of distinct subformulas.
inline std::size_t closure_size(const Formula& f) {
  std::unordered_set<Formula, FormulaHash> seen;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (!seen.insert(g).second) return;
    const int arity = op_arity(g.op());
    if (arity >= 1) walk(g.lhs());
    if (arity == 2) walk(g.rhs());
  };
  walk(f);
  return seen.size();
}

}  // namespace tlgcs
