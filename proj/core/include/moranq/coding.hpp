#pragma once

// Finite words over level-dependent alphabets, prefix relations and
// maximal antichains of the coding tree.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moranq {

// Branch counts n_1, n_2, ... of a coding tree. The counts repeat with the
// period of the stored vector, so level k uses counts[(k - 1) % period].
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<int> branch_counts);

  // Number of symbols available at 1-based level `level`.
  int size_at(std::size_t level) const;
  std::size_t period() const { return counts_.size(); }

 private:
  std::vector<int> counts_;
};

// An immutable finite word sigma = (sigma(1), ..., sigma(k)); symbols are
// 1-based. The empty word is the root of the coding tree.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> symbols);
  explicit Word(std::vector<int> symbols);

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }

  // sigma(h) for 1 <= h <= size().
  int at(std::size_t h) const;
  std::span<const int> symbols() const { return symbols_; }

  // sigma * i, unchecked against any alphabet.
  Word child(int symbol) const;
  // sigma^-; the parent of a length-one word is the empty word.
  Word parent() const;

  // Dot-separated symbols, e.g. "1.2.1"; the empty word is "".
  std::string to_string() const;
  static Word parse(std::string_view text);

  friend bool operator==(const Word&, const Word&) = default;
  // Lexicographic order; a proper prefix sorts before its extensions.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    return a.symbols_ <=> b.symbols_;
  }

 private:
  std::vector<int> symbols_;
};

// Checks that every symbol of `word`, placed after `offset` levels, lies in
// the alphabet. Throws InvalidWordError on the first violation.
void validate_word(const Alphabet& alphabet, const Word& word,
                   std::size_t offset = 0);

// sigma * tau where tau occupies levels |sigma|+1, ..., |sigma|+|tau|.
Word concat(const Alphabet& alphabet, const Word& sigma, const Word& tau);

// sigma|_h. Throws RangeError unless 0 <= h <= |sigma|.
Word truncate(const Word& sigma, std::size_t h);

enum class Relation { kEqual, kPrefix, kExtension, kIncomparable };

// Classifies sigma against tau: kPrefix means sigma is a proper prefix of tau,
// kExtension means tau is a proper prefix of sigma.
Relation relation(const Word& sigma, const Word& tau);

const char* to_string(Relation rel);

// A finite set of pairwise incomparable words.
struct Antichain {
  std::vector<Word> words;

  std::size_t min_length() const;
  std::size_t max_length() const;
};

struct MaximalityResult {
  bool maximal = false;
  // A word of length `depth` with no prefix in the set, when one exists.
  std::optional<Word> uncovered;
  // A pair of comparable (or duplicated) members, when one exists.
  std::optional<std::pair<Word, Word>> comparable;
};

// True iff the words are pairwise incomparable and every word of length
// `depth` has a prefix among them. Requires depth >= longest member.
MaximalityResult is_maximal_antichain(std::span<const Word> words,
                                      const Alphabet& alphabet,
                                      std::size_t depth);

}  // namespace moranq

template <>
struct std::hash<moranq::Word> {
  std::size_t operator()(const moranq::Word& w) const noexcept;
};
