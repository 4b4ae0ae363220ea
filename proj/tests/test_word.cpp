#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "accensus/word.hpp"

using namespace accensus;

namespace {

Word W(const std::string& s, int rank = 2) { return parse_word(s, rank); }

Word random_word(std::mt19937_64& rng, std::size_t max_len, int rank = 2) {
  Word w(rank);
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i)
    w.push_reduced(static_cast<LetterCode>(rng() % (2 * rank)));
  return w;
}

// independent rotation-by-rotation scan, no shared code with cyclic_hamming
std::size_t hamming_oracle(const Word& u, const Word& v) {
  const Word& s = u.length() <= v.length() ? u : v;
  const Word& l = u.length() <= v.length() ? v : u;
  if (l.empty()) return 0;
  std::size_t best = SIZE_MAX;
  for (std::size_t r = 0; r < l.length(); ++r) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < l.length(); ++i) {
      LetterCode lc = l.letter((i + r) % l.length());
      if (i < s.length()) {
        if (s.letter(i) != lc) ++m;
      } else {
        ++m;
      }
    }
    best = std::min(best, m);
  }
  return best;
}

}  // namespace

TEST_CASE("parsing reduces freely") {
  CHECK(W("xX").empty());
  CHECK(to_string(W("xX")) == "1");
  CHECK(W("xxY").length() == 3);
  CHECK(to_string(W("xxY")) == "xxY");
  CHECK(W("xYyX").empty());
  CHECK(W("1").empty());
  CHECK_THROWS_AS(parse_word("xz", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_word("x3", 2), std::invalid_argument);
}

TEST_CASE("general rank round trip") {
  Word w = parse_word("x1X3x2", 3);
  CHECK(w.length() == 3);
  CHECK(to_string(w) == "x1X3x2");
  CHECK(parse_word("x1X1", 3).empty());
}

TEST_CASE("multiply") {
  CHECK(to_string(multiply(W("xy"), W("Yx"))) == "xx");
  CHECK(multiply(W("1"), W("xyX")) == W("xyX"));
  CHECK(multiply(W("xY"), W("yX")).empty());
  CHECK_THROWS_AS(multiply(W("x"), parse_word("x", 3)), std::invalid_argument);
}

TEST_CASE("invert") {
  CHECK(to_string(invert(W("xyX"))) == "xYX");
  CHECK(invert(W("1")).empty());
  CHECK(to_string(invert(W("x"))) == "X");
}

TEST_CASE("conjugate") {
  CHECK(to_string(conjugate(W("x"), W("y"))) == "yxY");
  CHECK(to_string(conjugate(W("yxY"), W("Y"))) == "x");
  CHECK(conjugate(W("1"), W("xy")).empty());
}

TEST_CASE("cyclic reduce") {
  auto r = cyclic_reduce(W("yxY"));
  CHECK(to_string(r.core) == "x");
  CHECK(to_string(r.conjugator) == "y");
  r = cyclic_reduce(W("xy"));
  CHECK(to_string(r.core) == "xy");
  CHECK(r.conjugator.empty());
  r = cyclic_reduce(W("Xyx"));
  CHECK(to_string(r.core) == "y");
  CHECK(to_string(r.conjugator) == "X");
}

TEST_CASE("exponent sums") {
  CHECK(exponent_sum(W("xxYXy"), 1) == 1);
  CHECK(exponent_sum(W("xxYYY"), 2) == -3);
  CHECK(exponent_sum(Word(2), 1) == 0);
  CHECK(exponent_sum(W("xxYXy"), 2) == 0);
}

TEST_CASE("cyclic hamming fixed cases") {
  CHECK(cyclic_hamming(W("xy"), W("yx")) == 0);
  CHECK(cyclic_hamming(W("xy"), W("xx")) == 1);
  CHECK(cyclic_hamming(W("xyx"), W("xy")) == 1);
  CHECK(cyclic_hamming(W("1"), W("1")) == 0);
  CHECK(cyclic_hamming(W("1"), W("xy")) == 2);
}

TEST_CASE("algebra properties on random words") {
  std::mt19937_64 rng(20240811);
  for (int t = 0; t < 2000; ++t) {
    Word u = random_word(rng, 12), v = random_word(rng, 12),
         w = random_word(rng, 12);
    CHECK(invert(invert(u)) == u);
    CHECK(multiply(u, invert(u)).empty());
    CHECK(multiply(multiply(u, v), w) == multiply(u, multiply(v, w)));
    CHECK(exponent_sum(multiply(u, v), 1) ==
          exponent_sum(u, 1) + exponent_sum(v, 1));
    CHECK(exponent_sum(multiply(u, v), 2) ==
          exponent_sum(u, 2) + exponent_sum(v, 2));

    auto r = cyclic_reduce(u);
    CHECK(r.core.length() <= u.length());
    CHECK(r.core.is_cyclically_reduced());
    CHECK(conjugate(r.core, r.conjugator) == u);

    // conjugation preserves the cyclic core up to rotation
    Word f = random_word(rng, 5);
    Word cu = cyclic_reduce(u).core;
    Word cc = cyclic_reduce(conjugate(u, f)).core;
    REQUIRE(cu.length() == cc.length());
    bool is_rot = cu.empty();
    for (std::size_t k = 0; k < cu.length() && !is_rot; ++k)
      if (rotate(cu, k) == cc) is_rot = true;
    CHECK(is_rot);
  }
}

TEST_CASE("cyclic hamming properties") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 3000; ++t) {
    Word u = random_word(rng, 8), v = random_word(rng, 8);
    std::size_t d = cyclic_hamming(u, v);
    CHECK(d == cyclic_hamming(v, u));
    CHECK(d == hamming_oracle(u, v));
    if (d == 0) {
      REQUIRE(u.length() == v.length());
      bool is_rot = u.empty();
      for (std::size_t k = 0; k < u.length() && !is_rot; ++k)
        if (rotate(u, k) == v) is_rot = true;
      CHECK(is_rot);
    }
    CHECK(cyclic_hamming(u, u) == 0);
  }
}
