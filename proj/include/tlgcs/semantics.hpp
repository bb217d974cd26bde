#pragma once

// Reference semantics evaluator, used as the test oracle against which
// every automaton construction is checked.
//
// Finite words use finite-trace semantics with strong next: a position
// must exist for any requirement placed on it. Lasso words are evaluated
// by unrolling: each temporal quantifier scans forward a bounded number
// of steps with positions wrapping from the end back to the lasso index.
// Scanning prefix + kLassoUnrollFactor * |cycle| * closure(f) steps is
// sufficient because subformula truth is a function of the position class
// and there are only prefix + |cycle| classes.

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "tlgcs/formula.hpp"
#include "tlgcs/word.hpp"

namespace tlgcs {

constexpr std::size_t kLassoUnrollFactor = 2;

namespace detail {

struct PairHash {
  std::size_t operator()(const std::pair<const void*, std::size_t>& p) const {
    return std::hash<const void*>()(p.first) * 1000003u ^ std::hash<std::size_t>()(p.second);
  }
};

class FiniteEval {
 public:
  explicit FiniteEval(const std::vector<Label>& letters) : letters_(letters) {}

  bool eval(const Formula& f, std::size_t j) {
    const auto key = std::make_pair(f.id(), j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool v = eval_raw(f, j);
    memo_.emplace(key, v);
    return v;
  }

 private:
  bool eval_raw(const Formula& f, std::size_t j) {
    const std::size_t n = letters_.size();
    switch (f.op()) {
      case Op::True: return true;
      case Op::False: return false;
      case Op::Atom: return label_contains(letters_[j], f.atom_name());
      case Op::Not: return !eval(f.lhs(), j);
      case Op::And: return eval(f.lhs(), j) && eval(f.rhs(), j);
      case Op::Or: return eval(f.lhs(), j) || eval(f.rhs(), j);
      case Op::Next: return j + 1 < n && eval(f.lhs(), j + 1);
      case Op::Eventually:
        for (std::size_t k = j; k < n; ++k)
          if (eval(f.lhs(), k)) return true;
        return false;
      case Op::Always:
        for (std::size_t k = j; k < n; ++k)
          if (!eval(f.lhs(), k)) return false;
        return true;
      case Op::Until:
        for (std::size_t k = j; k < n; ++k) {
          if (eval(f.rhs(), k)) return true;
          if (!eval(f.lhs(), k)) return false;
        }
        return false;
    }
    throw Error("check_word: malformed formula");
  }

  const std::vector<Label>& letters_;
  std::unordered_map<std::pair<const void*, std::size_t>, bool, PairHash> memo_;
};

class LassoEval {
 public:
  LassoEval(const std::vector<Label>& letters, std::size_t lasso, std::size_t window)
      : letters_(letters), lasso_(lasso), window_(window) {}

  bool eval(const Formula& f, std::size_t c) {
    const auto key = std::make_pair(f.id(), c);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    // The scans below only recurse into strict subformulas, so no cycle
    // through the same (formula, class) pair can occur.
    const bool v = eval_raw(f, c);
    memo_.emplace(key, v);
    return v;
  }

 private:
  std::size_t succ(std::size_t c) const { return c + 1 < letters_.size() ? c + 1 : lasso_; }

  bool eval_raw(const Formula& f, std::size_t c) {
    switch (f.op()) {
      case Op::True: return true;
      case Op::False: return false;
      case Op::Atom: return label_contains(letters_[c], f.atom_name());
      case Op::Not: return !eval(f.lhs(), c);
      case Op::And: return eval(f.lhs(), c) && eval(f.rhs(), c);
      case Op::Or: return eval(f.lhs(), c) || eval(f.rhs(), c);
      case Op::Next: return eval(f.lhs(), succ(c));
      case Op::Eventually: {
        std::size_t cur = c;
        for (std::size_t step = 0; step <= window_; ++step, cur = succ(cur))
          if (eval(f.lhs(), cur)) return true;
        return false;
      }
      case Op::Always: {
        std::size_t cur = c;
        for (std::size_t step = 0; step <= window_; ++step, cur = succ(cur))
          if (!eval(f.lhs(), cur)) return false;
        return true;
      }
      case Op::Until: {
        std::size_t cur = c;
        for (std::size_t step = 0; step <= window_; ++step, cur = succ(cur)) {
          if (eval(f.rhs(), cur)) return true;
          if (!eval(f.lhs(), cur)) return false;
        }
        return false;
      }
    }
    throw Error("check_word: malformed formula");
  }

  const std::vector<Label>& letters_;
  std::size_t lasso_;
  std::size_t window_;
  std::unordered_map<std::pair<const void*, std::size_t>, bool, PairHash> memo_;
};

}  // namespace detail

// Recursive evaluation of the semantic clauses. Finite, non-lasso words are
// only meaningful for co-safe formulas and are rejected otherwise.
inline bool check_word(const Formula& f, const Word& w) {
  w.validate();
  if (w.letters.empty()) throw Error("check_word: word must be nonempty");
  if (w.is_lasso()) {
    const std::size_t cycle = w.letters.size() - *w.lasso;
    const std::size_t window =
        *w.lasso + kLassoUnrollFactor * cycle * std::max<std::size_t>(1, closure_size(f));
    detail::LassoEval ev(w.letters, *w.lasso, window);
    return ev.eval(f, 0);
  }
  if (!is_syntactically_cosafe(to_nnf(f)))
    throw CosafeRequired(
        "check_word: finite word given for a formula outside the co-safe fragment; "
        "a lasso word is required");
  detail::FiniteEval ev(w.letters);
  return ev.eval(f, 0);
}

}  // namespace tlgcs
