#pragma once

// Deterministic automata over an explicit, finite alphabet of label sets.
// The transition table is total by construction; DFAs accept a finite word
// when the run ends in F, DBAs accept a lasso word when the periodic part
// of the run visits F.

#include <array>
#include <cstddef>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlgcs/errors.hpp"
#include "tlgcs/word.hpp"

namespace tlgcs {

struct Automaton {
  enum class Kind { Dfa, Dba };

  Kind kind = Kind::Dfa;
  std::vector<Label> alphabet;
  std::unordered_map<Label, int, LabelHash> letter_of;
  int initial = 0;
  std::vector<std::vector<int>> next;  // [state][letter]
  std::vector<char> accepting;
  std::vector<std::string> state_names;  // diagnostics only, may be empty

  int num_states() const { return static_cast<int>(next.size()); }

  int letter_index(const Label& l) const {
    auto it = letter_of.find(l);
    if (it == letter_of.end())
      throw Error("automaton: letter " + label_to_string(l) + " outside alphabet");
    return it->second;
  }

  int step(int state, const Label& l) const { return next[state][letter_index(l)]; }

  int run(int from, const std::vector<Label>& letters) const {
    int q = from;
    for (const Label& l : letters) q = step(q, l);
    return q;
  }

  bool accepts_finite(const std::vector<Label>& letters) const {
    return accepting[run(initial, letters)] != 0;
  }

  // Structural invariants: totality and determinism of the table.
  void check_well_formed() const {
    if (next.size() != accepting.size()) throw Error("automaton: state arrays disagree");
    if (initial < 0 || initial >= num_states()) throw Error("automaton: bad initial state");
    if (alphabet.empty()) throw Error("automaton: empty alphabet");
    for (const auto& row : next) {
      if (row.size() != alphabet.size()) throw Error("automaton: transition row not total");
      for (int t : row)
        if (t < 0 || t >= num_states()) throw Error("automaton: dangling transition");
    }
  }

  // One line per transition; accepting states double-circled.
  std::string to_dot(const std::string& name = "automaton") const {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n  __init [shape=point];\n";
    for (int q = 0; q < num_states(); ++q) {
      os << "  q" << q << " [shape=" << (accepting[q] ? "doublecircle" : "circle");
      if (q < static_cast<int>(state_names.size()) && !state_names[q].empty())
        os << ", label=\"q" << q << "\\n" << state_names[q] << "\"";
      os << "];\n";
    }
    os << "  __init -> q" << initial << ";\n";
    for (int q = 0; q < num_states(); ++q)
      for (std::size_t a = 0; a < alphabet.size(); ++a)
        os << "  q" << q << " -> q" << next[q][a] << " [label=\"" << label_to_string(alphabet[a])
           << "\"];\n";
    os << "}\n";
    return os.str();
  }
};

// Lasso acceptance. For a DBA: run the prefix, then iterate the cycle until
// the state at a cycle boundary repeats (at most |Q| iterations by
// pigeonhole) and test whether F was visited inside the repeating block.
// For a DFA the acceptance is prefix-only: the state after the prefix must
// be in F.
inline bool accepts_lasso(const Automaton& aut, const std::vector<Label>& prefix,
                          const std::vector<Label>& cycle) {
  if (cycle.empty()) throw Error("accepts_lasso: cycle must be nonempty");
  if (aut.kind == Automaton::Kind::Dfa) return aut.accepting[aut.run(aut.initial, prefix)] != 0;

  int q = aut.run(aut.initial, prefix);
  std::unordered_map<int, std::size_t> boundary_seen;  // state -> iteration index
  std::vector<char> f_hit_in_iter;
  for (std::size_t iter = 0; iter <= static_cast<std::size_t>(aut.num_states()); ++iter) {
    auto it = boundary_seen.find(q);
    if (it != boundary_seen.end()) {
      for (std::size_t j = it->second; j < iter; ++j)
        if (f_hit_in_iter[j]) return true;
      return false;
    }
    boundary_seen.emplace(q, iter);
    bool hit = false;
    for (const Label& l : cycle) {
      q = aut.step(q, l);
      hit = hit || aut.accepting[q];
    }
    f_hit_in_iter.push_back(hit ? 1 : 0);
  }
  throw Error("accepts_lasso: cycle iteration failed to close");  // unreachable
}

inline bool accepts_lasso(const Automaton& aut, const Word& w) {
  if (!w.is_lasso()) throw Error("accepts_lasso: word has no lasso index");
  return accepts_lasso(aut, w.prefix_letters(), w.cycle_letters());
}

}  // namespace tlgcs
