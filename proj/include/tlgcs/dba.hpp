#pragma once

// Best-effort LTL to deterministic Buchi automaton.
//
// The transition structure is formula progression (deterministic by
// construction). Acceptance is generalized Buchi with one set per
// eventuality subformula -- a state satisfies set i when eventuality i is
// not "must-pending" in its residual -- degeneralized with a round-robin
// counter and reduced by a bisimulation quotient.
//
// The construction is known to be incomplete (no DBA exists for e.g.
// F G a), so every built automaton is validated against the check_word
// oracle on an exhaustive set of short lasso words over the projected
// alphabet; any disagreement raises UnsupportedFormula.

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tlgcs/automaton.hpp"
#include "tlgcs/dfa.hpp"
#include "tlgcs/formula.hpp"
#include "tlgcs/semantics.hpp"
#include "tlgcs/word.hpp"

namespace tlgcs {
namespace detail {

inline void collect_eventualities(const Formula& f, std::vector<Formula>& out) {
  if (f.op() == Op::Until || f.op() == Op::Eventually) {
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  const int arity = op_arity(f.op());
  if (arity >= 1) collect_eventualities(f.lhs(), out);
  if (arity == 2) collect_eventualities(f.rhs(), out);
}

// Is the residual unsatisfiable once eventuality `e` is assumed false?
// The Boolean skeleton above temporal leaves is monotone, so it suffices
// to evaluate with every other leaf set to true.
inline bool must_pending(const Formula& e, const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return false;
    case Op::False:
      return true;
    case Op::And:
      return must_pending(e, f.lhs()) || must_pending(e, f.rhs());
    case Op::Or:
      return must_pending(e, f.lhs()) && must_pending(e, f.rhs());
    default:
      return f == e;  // leaf: false unless it is the tracked eventuality
  }
}

struct DbaState {
  Formula residual;
  int counter;  // round-robin index into the eventuality list; 0 if none
  bool operator==(const DbaState& o) const { return counter == o.counter && residual == o.residual; }
};

struct DbaStateHash {
  std::size_t operator()(const DbaState& s) const { return s.residual.hash() * 31 + s.counter; }
};

// Enumerate all lasso words with prefix+cycle length up to `depth` over the
// given letters and compare automaton acceptance with the semantics oracle.
inline void validate_dba(const Automaton& aut, const Formula& f,
                         const std::vector<Label>& letters, std::size_t depth) {
  std::vector<std::size_t> digits;
  std::vector<Label> buf;
  for (std::size_t len = 1; len <= depth; ++len) {
    digits.assign(len, 0);
    while (true) {
      buf.clear();
      for (std::size_t i = 0; i < len; ++i) buf.push_back(letters[digits[i]]);
      for (std::size_t split = 0; split < len; ++split) {
        std::vector<Label> prefix(buf.begin(), buf.begin() + static_cast<long>(split));
        std::vector<Label> cycle(buf.begin() + static_cast<long>(split), buf.end());
        const bool by_aut = accepts_lasso(aut, prefix, cycle);
        const bool by_sem = check_word(f, lasso_word(prefix, cycle));
        if (by_aut != by_sem) {
          throw UnsupportedFormula(
              "ltl_to_dba: no deterministic Buchi automaton found for " + print_formula(f) +
              " (constructed automaton disagrees with the semantics on " +
              word_to_string(lasso_word(prefix, cycle)) + ")");
        }
      }
      // next word
      std::size_t i = 0;
      for (; i < len; ++i) {
        if (++digits[i] < letters.size()) break;
        digits[i] = 0;
      }
      if (i == len) break;
    }
  }
}

}  // namespace detail

// Compile an LTL formula (any formula in the supported fragment) into a DBA
// over the given alphabet such that lasso acceptance agrees with check_word.
// Raises UnsupportedFormula when the construction cannot represent the
// formula deterministically.
inline Automaton ltl_to_dba(const Formula& f, const std::vector<Label>& alphabet) {
  if (alphabet.empty()) throw Error("ltl_to_dba: alphabet must be nonempty");
  const Formula nnf = detail::normalize(to_nnf(f));

  std::vector<Formula> evs;
  detail::collect_eventualities(nnf, evs);
  std::sort(evs.begin(), evs.end(),
            [](const Formula& a, const Formula& b) { return Formula::compare(a, b) < 0; });
  const int m = static_cast<int>(evs.size());

  Automaton aut;
  aut.kind = Automaton::Kind::Dba;
  aut.alphabet = alphabet;
  for (std::size_t i = 0; i < alphabet.size(); ++i) aut.letter_of[alphabet[i]] = static_cast<int>(i);

  std::unordered_map<detail::DbaState, int, detail::DbaStateHash> index;
  std::vector<detail::DbaState> states;
  std::deque<int> queue;

  auto satisfied_set = [&](const Formula& residual, int i) {
    return !detail::must_pending(evs[i], residual);
  };
  auto intern = [&](detail::DbaState s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(states.size());
    index.emplace(s, id);
    states.push_back(s);
    aut.next.emplace_back(alphabet.size(), -1);
    bool acc;
    if (m == 0) {
      acc = s.residual != Formula::fls();
    } else {
      acc = s.counter == 0 && satisfied_set(s.residual, 0);
    }
    aut.accepting.push_back(acc ? 1 : 0);
    queue.push_back(id);
    return id;
  };

  aut.initial = intern({nnf, 0});
  while (!queue.empty()) {
    const int q = queue.front();
    queue.pop_front();
    const detail::DbaState s = states[q];
    int next_counter = s.counter;
    if (m > 0 && satisfied_set(s.residual, s.counter)) next_counter = (s.counter + 1) % m;
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      const Formula r = detail::normalize(detail::progress(s.residual, alphabet[a]));
      aut.next[q][a] = intern({r, next_counter});
    }
  }
  for (const auto& s : states)
    aut.state_names.push_back(print_formula(s.residual) + " #" + std::to_string(s.counter));

  // Bisimulation quotient: safe for deterministic Buchi automata.
  const std::vector<int> part = detail::hopcroft_partition(aut.next, aut.accepting, alphabet.size());
  Automaton min = detail::quotient(aut, part);
  min.kind = Automaton::Kind::Dba;
  min.check_well_formed();

  // Self-validation over the projected alphabet: transitions only inspect
  // the formula's own atoms, so distinct projections cover all behaviors.
  const std::set<std::string> atoms = formula_atoms(nnf);
  std::vector<Label> reps;
  {
    std::unordered_map<Label, int, LabelHash> seen;
    for (const Label& l : alphabet) {
      Label proj;
      for (const auto& a : l)
        if (atoms.count(a)) proj.push_back(a);
      if (seen.emplace(proj, 1).second) reps.push_back(l);
    }
  }
  constexpr std::size_t kValidationBudget = 200000;
  std::size_t depth = 2;
  {
    std::size_t total = 0;
    while (depth < 14) {
      std::size_t add = 1;
      for (std::size_t i = 0; i < depth + 1; ++i) {
        add *= reps.size();
        if (add > kValidationBudget) break;
      }
      add *= (depth + 1);  // split positions
      if (total + add > kValidationBudget) break;
      total += add;
      ++depth;
    }
  }
  detail::validate_dba(min, nnf, reps, depth);
  return min;
}

}  // namespace tlgcs
