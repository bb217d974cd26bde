#pragma once

// Co-safe LTL to DFA by formula progression: states are residual formulas
// under a syntactic normal form (constant folding plus flatten/sort/dedupe
// of conjunctions and disjunctions), explored on the fly over the given
// alphabet and then Hopcroft-minimized.
//
// The normal form deliberately avoids rewrites that are only valid over
// nonempty continuations (e.g. F true -> true): residuals also decide
// end-of-word acceptance, where such equivalences do not hold.

#include <algorithm>
#include <deque>
#include <list>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tlgcs/automaton.hpp"
#include "tlgcs/formula.hpp"
#include "tlgcs/word.hpp"

namespace tlgcs {
namespace detail {

inline void flatten(Op op, const Formula& f, std::vector<Formula>& out) {
  if (f.op() == op) {
    flatten(op, f.lhs(), out);
    flatten(op, f.rhs(), out);
    return;
  }
  out.push_back(f);
}

inline Formula rebuild_chain(Op op, const std::vector<Formula>& children, const Formula& unit) {
  if (children.empty()) return unit;
  Formula acc = children.back();
  for (auto it = children.rbegin() + 1; it != children.rend(); ++it)
    acc = op == Op::And ? Formula::conj(*it, acc) : Formula::disj(*it, acc);
  return acc;
}

// Canonical form for progression states.
inline Formula normalize(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::Not:
      return Formula::negation(normalize(f.lhs()));
    case Op::Next:
      return Formula::next(normalize(f.lhs()));
    case Op::Eventually:
      return Formula::eventually(normalize(f.lhs()));
    case Op::Always:
      return Formula::always(normalize(f.lhs()));
    case Op::Until:
      return Formula::until(normalize(f.lhs()), normalize(f.rhs()));
    case Op::And:
    case Op::Or: {
      const Op op = f.op();
      std::vector<Formula> raw;
      flatten(op, f, raw);
      std::vector<Formula> kids;
      kids.reserve(raw.size());
      const Formula absorb = op == Op::And ? Formula::fls() : Formula::tru();
      const Formula unit = op == Op::And ? Formula::tru() : Formula::fls();
      for (const Formula& c : raw) {
        Formula n = normalize(c);
        if (n == absorb) return absorb;
        if (n == unit) continue;
        kids.push_back(n);
      }
      std::sort(kids.begin(), kids.end(),
                [](const Formula& a, const Formula& b) { return Formula::compare(a, b) < 0; });
      kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
      if (kids.empty()) return unit;
      if (kids.size() == 1) return kids[0];
      return rebuild_chain(op, kids, unit);
    }
  }
  throw Error("normalize: malformed formula");
}

// One-letter residual. Input and output are in NNF (plus the False node).
inline Formula progress(const Formula& f, const Label& letter) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Atom:
      return label_contains(letter, f.atom_name()) ? Formula::tru() : Formula::fls();
    case Op::Not:  // NNF: negation sits on an atom
      return label_contains(letter, f.lhs().atom_name()) ? Formula::fls() : Formula::tru();
    case Op::And:
      return Formula::conj(progress(f.lhs(), letter), progress(f.rhs(), letter));
    case Op::Or:
      return Formula::disj(progress(f.lhs(), letter), progress(f.rhs(), letter));
    case Op::Next:
      return f.lhs();
    case Op::Until:
      return Formula::disj(progress(f.rhs(), letter),
                           Formula::conj(progress(f.lhs(), letter), f));
    case Op::Eventually:
      return Formula::disj(progress(f.lhs(), letter), f);
    case Op::Always:
      return Formula::conj(progress(f.lhs(), letter), f);
  }
  throw Error("progress: malformed formula");
}

// Does the residual hold on the empty continuation? Any requirement on a
// position past the end of the word is false.
inline bool accepts_empty_suffix(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::Always:
      return true;
    case Op::And:
      return accepts_empty_suffix(f.lhs()) && accepts_empty_suffix(f.rhs());
    case Op::Or:
      return accepts_empty_suffix(f.lhs()) || accepts_empty_suffix(f.rhs());
    default:
      return false;  // False, Atom, !Atom, Next, Until, Eventually
  }
}

// Hopcroft partition refinement. `next` must be total and deterministic.
inline std::vector<int> hopcroft_partition(const std::vector<std::vector<int>>& next,
                                           const std::vector<char>& accepting,
                                           std::size_t n_letters) {
  const int n = static_cast<int>(next.size());
  // Inverse transitions per letter.
  std::vector<std::vector<std::vector<int>>> pre(n_letters, std::vector<std::vector<int>>(n));
  for (int q = 0; q < n; ++q)
    for (std::size_t a = 0; a < n_letters; ++a) pre[a][next[q][a]].push_back(q);

  std::vector<int> block_of(n, -1);
  std::vector<std::vector<int>> blocks;
  {
    std::vector<int> acc, rej;
    for (int q = 0; q < n; ++q) (accepting[q] ? acc : rej).push_back(q);
    if (!acc.empty()) {
      for (int q : acc) block_of[q] = static_cast<int>(blocks.size());
      blocks.push_back(std::move(acc));
    }
    if (!rej.empty()) {
      for (int q : rej) block_of[q] = static_cast<int>(blocks.size());
      blocks.push_back(std::move(rej));
    }
  }

  std::deque<std::pair<int, std::size_t>> work;  // (block, letter)
  std::vector<std::vector<char>> in_work(n_letters);
  auto push_work = [&](int b, std::size_t a) {
    if (static_cast<std::size_t>(b) >= in_work[a].size()) in_work[a].resize(b + 1, 0);
    if (!in_work[a][b]) {
      in_work[a][b] = 1;
      work.emplace_back(b, a);
    }
  };
  for (std::size_t a = 0; a < n_letters; ++a)
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b) push_work(b, a);

  std::vector<int> touched_count;  // per-block count of states hit by the splitter
  std::vector<int> touched_blocks;
  while (!work.empty()) {
    auto [splitter, a] = work.front();
    work.pop_front();
    in_work[a][splitter] = 0;

    touched_count.assign(blocks.size(), 0);
    touched_blocks.clear();
    std::vector<int> splitter_states = blocks[splitter];  // copy: blocks may change
    std::vector<std::vector<int>> hits(blocks.size());
    for (int t : splitter_states) {
      for (int q : pre[a][t]) {
        const int b = block_of[q];
        if (touched_count[b]++ == 0) touched_blocks.push_back(b);
        hits[b].push_back(q);
      }
    }
    for (int b : touched_blocks) {
      if (touched_count[b] == static_cast<int>(blocks[b].size())) continue;  // no split
      // Split block b into hit part and the rest.
      std::vector<int>& hit = hits[b];
      std::sort(hit.begin(), hit.end());
      hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
      if (hit.size() == blocks[b].size()) continue;
      std::vector<int> rest;
      rest.reserve(blocks[b].size() - hit.size());
      for (int q : blocks[b])
        if (!std::binary_search(hit.begin(), hit.end(), q)) rest.push_back(q);
      const int nb = static_cast<int>(blocks.size());
      blocks[b] = hit;
      blocks.push_back(rest);
      for (int q : blocks[b]) block_of[q] = b;
      for (int q : blocks[nb]) block_of[q] = nb;
      for (std::size_t c = 0; c < n_letters; ++c) {
        if (static_cast<std::size_t>(nb) >= in_work[c].size()) in_work[c].resize(nb + 1, 0);
        if (in_work[c][b]) {
          push_work(nb, c);
        } else {
          // Add the smaller piece.
          push_work(blocks[b].size() <= blocks[nb].size() ? b : nb, c);
        }
      }
    }
  }
  return block_of;
}

// Quotient a deterministic automaton by a state partition.
inline Automaton quotient(const Automaton& in, const std::vector<int>& block_of) {
  const int n_blocks = block_of.empty() ? 0 : *std::max_element(block_of.begin(), block_of.end()) + 1;
  Automaton out;
  out.kind = in.kind;
  out.alphabet = in.alphabet;
  out.letter_of = in.letter_of;
  out.initial = block_of[in.initial];
  out.next.assign(n_blocks, std::vector<int>(in.alphabet.size(), -1));
  out.accepting.assign(n_blocks, 0);
  out.state_names.assign(n_blocks, "");
  for (int q = 0; q < in.num_states(); ++q) {
    const int b = block_of[q];
    out.accepting[b] = in.accepting[q];
    if (q < static_cast<int>(in.state_names.size()) && out.state_names[b].empty())
      out.state_names[b] = in.state_names[q];
    for (std::size_t a = 0; a < in.alphabet.size(); ++a) out.next[b][a] = block_of[in.next[q][a]];
  }
  return out;
}

// Keep only states reachable from the initial one (progression already
// yields reachable-only states; quotienting preserves that).
struct ProgressionResult {
  Automaton aut;
  std::vector<Formula> state_formulas;
};

inline ProgressionResult build_progression_dfa(const Formula& nnf,
                                               const std::vector<Label>& alphabet) {
  ProgressionResult res;
  Automaton& aut = res.aut;
  aut.kind = Automaton::Kind::Dfa;
  aut.alphabet = alphabet;
  for (std::size_t i = 0; i < alphabet.size(); ++i) aut.letter_of[alphabet[i]] = static_cast<int>(i);

  std::unordered_map<Formula, int, FormulaHash> index;
  std::deque<int> queue;
  auto intern = [&](const Formula& f) {
    auto it = index.find(f);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(res.state_formulas.size());
    index.emplace(f, id);
    res.state_formulas.push_back(f);
    aut.next.emplace_back(alphabet.size(), -1);
    aut.accepting.push_back(accepts_empty_suffix(f) ? 1 : 0);
    queue.push_back(id);
    return id;
  };

  aut.initial = intern(normalize(nnf));
  while (!queue.empty()) {
    const int q = queue.front();
    queue.pop_front();
    const Formula f = res.state_formulas[q];
    for (std::size_t a = 0; a < alphabet.size(); ++a)
      aut.next[q][a] = intern(normalize(progress(f, alphabet[a])));
  }
  for (int q = 0; q < aut.num_states(); ++q) aut.state_names.push_back(print_formula(res.state_formulas[q]));
  return res;
}

}  // namespace detail

// Compile a syntactically co-safe formula into the minimal DFA over the
// given alphabet. For every finite word w over the alphabet the DFA accepts
// w iff check_word(f, w).
inline Automaton ltlf_to_dfa(const Formula& f, const std::vector<Label>& alphabet) {
  if (alphabet.empty()) throw Error("ltlf_to_dfa: alphabet must be nonempty");
  const Formula nnf = to_nnf(f);
  if (!is_syntactically_cosafe(nnf))
    throw CosafeRequired("ltlf_to_dfa: formula is not syntactically co-safe: " + print_formula(f));

  detail::ProgressionResult prog = detail::build_progression_dfa(nnf, alphabet);
  const std::vector<int> part =
      detail::hopcroft_partition(prog.aut.next, prog.aut.accepting, alphabet.size());
  Automaton min = detail::quotient(prog.aut, part);
  min.check_well_formed();
  return min;
}

}  // namespace tlgcs
