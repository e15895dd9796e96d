#include "moranq/coding.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "moranq/errors.hpp"

namespace moranq {

Alphabet::Alphabet(std::vector<int> branch_counts)
    : counts_(std::move(branch_counts)) {
  if (counts_.empty()) throw ValidationError("alphabet needs at least one level");
}

int Alphabet::size_at(std::size_t level) const {
  if (level == 0) throw RangeError("levels are 1-based");
  return counts_[(level - 1) % counts_.size()];
}

Word::Word(std::initializer_list<int> symbols) : symbols_(symbols) {}

Word::Word(std::vector<int> symbols) : symbols_(std::move(symbols)) {}

int Word::at(std::size_t h) const {
  if (h == 0 || h > symbols_.size()) {
    throw RangeError("symbol index " + std::to_string(h) + " outside word of length " +
                     std::to_string(symbols_.size()));
  }
  return symbols_[h - 1];
}

Word Word::child(int symbol) const {
  std::vector<int> s;
  s.reserve(symbols_.size() + 1);
  s.assign(symbols_.begin(), symbols_.end());
  s.push_back(symbol);
  return Word(std::move(s));
}

Word Word::parent() const {
  if (symbols_.empty()) throw RangeError("the empty word has no parent");
  return Word(std::vector<int>(symbols_.begin(), symbols_.end() - 1));
}

std::string Word::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(symbols_[i]);
  }
  return out;
}

Word Word::parse(std::string_view text) {
  std::vector<int> s;
  if (text.empty()) return Word();
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    if (dot == std::string_view::npos) dot = text.size();
    std::string_view token = text.substr(pos, dot - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value < 1) {
      throw InvalidWordError("malformed word '" + std::string(text) + "'");
    }
    s.push_back(value);
    pos = dot + 1;
  }
  return Word(std::move(s));
}

void validate_word(const Alphabet& alphabet, const Word& word, std::size_t offset) {
  for (std::size_t h = 1; h <= word.size(); ++h) {
    const int n = alphabet.size_at(offset + h);
    const int s = word.at(h);
    if (s < 1 || s > n) {
      throw InvalidWordError("symbol " + std::to_string(s) + " at level " +
                             std::to_string(offset + h) + " is outside {1.." +
                             std::to_string(n) + "}");
    }
  }
}

Word concat(const Alphabet& alphabet, const Word& sigma, const Word& tau) {
  validate_word(alphabet, tau, sigma.size());
  std::vector<int> s(sigma.symbols().begin(), sigma.symbols().end());
  s.insert(s.end(), tau.symbols().begin(), tau.symbols().end());
  return Word(std::move(s));
}

Word truncate(const Word& sigma, std::size_t h) {
  if (h > sigma.size()) {
    throw RangeError("cannot truncate a word of length " + std::to_string(sigma.size()) +
                     " to length " + std::to_string(h));
  }
  auto s = sigma.symbols();
  return Word(std::vector<int>(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(h)));
}

Relation relation(const Word& sigma, const Word& tau) {
  auto a = sigma.symbols();
  auto b = tau.symbols();
  const std::size_t common = std::min(a.size(), b.size());
  if (!std::equal(a.begin(), a.begin() + common, b.begin())) return Relation::kIncomparable;
  if (a.size() == b.size()) return Relation::kEqual;
  return a.size() < b.size() ? Relation::kPrefix : Relation::kExtension;
}

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::kEqual: return "equal";
    case Relation::kPrefix: return "prefix";
    case Relation::kExtension: return "extension";
    case Relation::kIncomparable: return "incomparable";
  }
  return "?";
}

std::size_t Antichain::min_length() const {
  std::size_t m = words.empty() ? 0 : words.front().size();
  for (const auto& w : words) m = std::min(m, w.size());
  return m;
}

std::size_t Antichain::max_length() const {
  std::size_t m = 0;
  for (const auto& w : words) m = std::max(m, w.size());
  return m;
}

namespace {

// Depth-first search for a word of length `depth` that avoids every member.
std::optional<Word> find_uncovered(const std::unordered_set<Word>& members,
                                   const Alphabet& alphabet, const Word& node,
                                   std::size_t depth) {
  if (members.contains(node)) return std::nullopt;
  if (node.size() == depth) return node;
  const int n = alphabet.size_at(node.size() + 1);
  for (int i = 1; i <= n; ++i) {
    if (auto w = find_uncovered(members, alphabet, node.child(i), depth)) return w;
  }
  return std::nullopt;
}

}  // namespace

MaximalityResult is_maximal_antichain(std::span<const Word> words,
                                      const Alphabet& alphabet, std::size_t depth) {
  MaximalityResult result;
  std::unordered_set<Word> members;
  for (const auto& w : words) {
    if (w.size() > depth) throw RangeError("depth is shorter than a member word");
    if (!members.insert(w).second) {
      result.comparable = std::make_pair(w, w);
      return result;
    }
  }
  // Incomparability: no member may have a proper prefix that is also a member.
  for (const auto& w : words) {
    for (std::size_t h = 0; h < w.size(); ++h) {
      Word prefix = truncate(w, h);
      if (members.contains(prefix)) {
        result.comparable = std::make_pair(prefix, w);
        return result;
      }
    }
  }
  result.uncovered = find_uncovered(members, alphabet, Word(), depth);
  result.maximal = !result.uncovered.has_value();
  return result;
}

}  // namespace moranq

std::size_t std::hash<moranq::Word>::operator()(const moranq::Word& w) const noexcept {
  // FNV-1a over the symbols.
  std::uint64_t h = 1469598103934665603ull;
  for (int s : w.symbols()) {
    h ^= static_cast<std::uint64_t>(s);
    h *= 1099511628211ull;
  }
  h ^= w.size();
  return static_cast<std::size_t>(h);
}
