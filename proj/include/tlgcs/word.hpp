#pragma once

// Words over 2^AP: a letter is a sorted set of atom names, a word is a
// letter sequence with an optional lasso index marking the start of the
// infinitely repeated suffix.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tlgcs/errors.hpp"

namespace tlgcs {

using Label = std::vector<std::string>;  // sorted, unique

inline Label make_label(std::initializer_list<std::string> atoms) {
  Label l(atoms);
  std::sort(l.begin(), l.end());
  l.erase(std::unique(l.begin(), l.end()), l.end());
  return l;
}

inline Label label_from_set(const std::set<std::string>& atoms) {
  return Label(atoms.begin(), atoms.end());
}

inline bool label_contains(const Label& l, const std::string& atom) {
  return std::binary_search(l.begin(), l.end(), atom);
}

struct LabelHash {
  std::size_t operator()(const Label& l) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (const auto& a : l) {
      h ^= std::hash<std::string>()(a);
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

inline std::string label_to_string(const Label& l) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < l.size(); ++i) os << (i ? "," : "") << l[i];
  os << '}';
  return os.str();
}

struct Word {
  std::vector<Label> letters;
  std::optional<std::size_t> lasso;  // start of the repeating suffix

  bool is_lasso() const { return lasso.has_value(); }
  std::size_t size() const { return letters.size(); }

  void validate() const {
    if (lasso && *lasso >= letters.size())
      throw Error("word: lasso index must be smaller than the word length");
  }

  std::vector<Label> prefix_letters() const {
    if (!lasso) return letters;
    return std::vector<Label>(letters.begin(), letters.begin() + static_cast<long>(*lasso));
  }

  std::vector<Label> cycle_letters() const {
    if (!lasso) return {};
    return std::vector<Label>(letters.begin() + static_cast<long>(*lasso), letters.end());
  }
};

inline Word finite_word(std::vector<Label> letters) { return Word{std::move(letters), std::nullopt}; }

inline Word lasso_word(std::vector<Label> prefix, const std::vector<Label>& cycle) {
  if (cycle.empty()) throw Error("lasso word: cycle must be nonempty");
  Word w;
  w.lasso = prefix.size();
  w.letters = std::move(prefix);
  w.letters.insert(w.letters.end(), cycle.begin(), cycle.end());
  return w;
}

inline std::string word_to_string(const Word& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (w.lasso && *w.lasso == i) os << "(";
    if (i) os << " ";
    os << label_to_string(w.letters[i]);
  }
  if (w.lasso) os << ")^w";
  return os.str();
}

}  // namespace tlgcs
