#include <doctest.h>

#include <random>

#include "moranq/coding.hpp"
#include "moranq/errors.hpp"

using namespace moranq;

namespace {
const Alphabet kBinary({2});
}

TEST_CASE("concat appends a suffix at the next levels") {
  CHECK(concat(kBinary, Word{1, 2}, Word{1}) == Word{1, 2, 1});
  CHECK(concat(kBinary, Word{}, Word{2}) == Word{2});
  CHECK_THROWS_AS(concat(kBinary, Word{1}, Word{3}), InvalidWordError);
}

TEST_CASE("concat checks symbols against the level they land on") {
  const Alphabet mixed({2, 3});
  CHECK(concat(mixed, Word{1}, Word{3}) == Word{1, 3});
  CHECK_THROWS_AS(concat(mixed, Word{}, Word{3}), InvalidWordError);
  CHECK_THROWS_AS(concat(mixed, Word{1, 3}, Word{3}), InvalidWordError);
  CHECK_THROWS_AS(concat(mixed, Word{1}, Word{0}), InvalidWordError);
}

TEST_CASE("truncate keeps the first h symbols") {
  CHECK(truncate(Word{1, 2, 1}, 2) == Word{1, 2});
  CHECK(truncate(Word{2}, 0) == Word{});
  CHECK(truncate(Word{2}, 0).empty());
  CHECK_THROWS_AS(truncate(Word{1, 2}, 3), RangeError);
  CHECK(Word{2}.parent() == Word{});
  CHECK(Word{1, 2, 2}.parent() == Word{1, 2});
}

TEST_CASE("relation classifies prefix, extension, equality and incomparability") {
  CHECK(relation(Word{1}, Word{1, 2}) == Relation::kPrefix);
  CHECK(relation(Word{1, 1}, Word{1, 2}) == Relation::kIncomparable);
  CHECK(relation(Word{1, 2}, Word{1, 2}) == Relation::kEqual);
  CHECK(relation(Word{1, 2}, Word{1}) == Relation::kExtension);
  CHECK(relation(Word{}, Word{2, 1}) == Relation::kPrefix);
}

TEST_CASE("maximal antichain check with witnesses") {
  const std::vector<Word> level2{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  CHECK(is_maximal_antichain(level2, kBinary, 2).maximal);

  const std::vector<Word> single{{1}};
  const auto r1 = is_maximal_antichain(single, kBinary, 1);
  CHECK_FALSE(r1.maximal);
  REQUIRE(r1.uncovered.has_value());
  CHECK(*r1.uncovered == Word{2});

  const std::vector<Word> chain{{1}, {1, 2}};
  const auto r2 = is_maximal_antichain(chain, kBinary, 2);
  CHECK_FALSE(r2.maximal);
  CHECK(r2.comparable.has_value());

  const std::vector<Word> mixed{{1}, {2, 1}, {2, 2}};
  CHECK(is_maximal_antichain(mixed, kBinary, 3).maximal);
}

TEST_CASE("words serialize as dot-separated symbols") {
  CHECK(Word{1, 2, 1}.to_string() == "1.2.1");
  CHECK(Word{}.to_string().empty());
  CHECK(Word::parse("1.2.1") == Word{1, 2, 1});
  CHECK(Word::parse("") == Word{});
  CHECK_THROWS(Word::parse("1..2"));
  CHECK_THROWS(Word::parse("a"));
}

TEST_CASE("property: truncating a concatenation recovers the prefix") {
  const Alphabet alphabet({2, 3, 4});
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto random_word = [&](std::size_t offset, std::size_t len) {
      std::vector<int> s;
      for (std::size_t h = 1; h <= len; ++h) {
        const int n = alphabet.size_at(offset + h);
        s.push_back(1 + static_cast<int>(rng() % static_cast<unsigned>(n)));
      }
      return Word(s);
    };
    const Word sigma = random_word(0, rng() % 6);
    const Word tau = random_word(sigma.size(), rng() % 6);
    const Word joined = concat(alphabet, sigma, tau);
    CHECK(joined.size() == sigma.size() + tau.size());
    CHECK(truncate(joined, sigma.size()) == sigma);

    const Word other = random_word(0, rng() % 6);
    const Relation forward = relation(sigma, other);
    const Relation backward = relation(other, sigma);
    CHECK((forward == Relation::kPrefix) == (backward == Relation::kExtension));
    CHECK((forward == Relation::kEqual) == (backward == Relation::kEqual));
    CHECK((forward == Relation::kIncomparable) == (backward == Relation::kIncomparable));
  }
}
