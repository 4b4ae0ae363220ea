#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "accensus/whitehead.hpp"
#include "support/primitive_oracle.hpp"

using namespace accensus;

namespace {
Word W(const std::string& s) { return parse_word(s, 2); }
}

TEST_CASE("automorphism generation") {
  const auto& auts = whitehead_auts(2);
  int type1 = 0, type2 = 0, identity = 0;
  for (const auto& a : auts) {
    if (a.kind == WhiteheadAut::Kind::TypeI) ++type1;
    if (a.kind == WhiteheadAut::Kind::TypeII) ++type2;
    if (to_string(a.images[0]) == "x" && to_string(a.images[1]) == "y") ++identity;
  }
  CHECK(type1 == 8);
  CHECK(type2 == 12);
  CHECK(identity == 1);
  CHECK_THROWS_AS(whitehead_auts(3), std::invalid_argument);
}

TEST_CASE("apply_aut") {
  // Type II with multiplier x, y -> yx
  WhiteheadAut t2{WhiteheadAut::Kind::TypeII, {W("x"), W("yx")}};
  CHECK(to_string(apply_aut(t2, W("y"))) == "yx");
  CHECK(to_string(apply_aut(t2, W("Y"))) == "XY");
  // Type I swapping x and y
  WhiteheadAut t1{WhiteheadAut::Kind::TypeI, {W("y"), W("x")}};
  CHECK(to_string(apply_aut(t1, W("xY"))) == "yX");
  CHECK(apply_aut(t1, W("1")).empty());
  // automorphism property on products
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const auto& auts = whitehead_auts(2);
    const WhiteheadAut& a = auts[rng() % auts.size()];
    Word u(2), v(2);
    for (std::size_t i = 0, n = rng() % 8; i < n; ++i)
      u.push_reduced(static_cast<LetterCode>(rng() % 4));
    for (std::size_t i = 0, n = rng() % 8; i < n; ++i)
      v.push_reduced(static_cast<LetterCode>(rng() % 4));
    CHECK(apply_aut(a, multiply(u, v)) ==
          multiply(apply_aut(a, u), apply_aut(a, v)));
  }
}

TEST_CASE("minimize_cyclic_length") {
  auto r = minimize_cyclic_length(W("x"));
  CHECK(to_string(r.minimal) == "x");
  CHECK(r.applied.empty());

  r = minimize_cyclic_length(W("xxy"));
  CHECK(r.minimal.length() == 1);

  r = minimize_cyclic_length(W("xyXY"));
  CHECK(r.minimal.length() == 4);

  // descent never increases and terminates within length steps
  std::mt19937_64 rng(17);
  for (int t = 0; t < 500; ++t) {
    Word u(2);
    for (std::size_t i = 0, n = rng() % 10; i < n; ++i)
      u.push_reduced(static_cast<LetterCode>(rng() % 4));
    auto m = minimize_cyclic_length(u);
    CHECK(m.minimal.length() <= cyclic_reduce(u).core.length());
    CHECK(m.applied.size() <= u.length());
    // replaying the applied sequence reaches the reported minimum
    Word cur = cyclic_reduce(u).core;
    for (const auto& a : m.applied) cur = cyclic_reduce(apply_aut(a, cur)).core;
    CHECK(cur.length() == m.minimal.length());
  }
}

TEST_CASE("primitivity basics") {
  CHECK(is_primitive(W("x")));
  CHECK(is_primitive(W("Y")));
  CHECK(is_primitive(W("xxy")));
  CHECK_FALSE(is_primitive(W("xyXY")));
  CHECK_FALSE(is_primitive(W("1")));
  CHECK_FALSE(is_primitive(W("xx")));
  CHECK_FALSE(is_primitive(W("xxYYY")));
  CHECK_FALSE(is_primitive(W("xyxYXY")));
  CHECK_FALSE(is_primitive(W("yxyXX")));
}

TEST_CASE("agreement with brute-force orbit oracle up to length 6") {
  testing::PrimitiveOracle oracle(6);
  // exhaustive over all freely reduced words of length <= 6
  std::vector<Word> all{Word(2)};
  std::size_t idx = 0;
  std::size_t checked = 0;
  while (idx < all.size()) {
    Word w = all[idx++];
    if (w.length() >= 6) break;
    for (LetterCode c = 0; c < 4; ++c) {
      if (!w.empty() && w.letters().back() == inverse_letter(c)) continue;
      std::vector<LetterCode> ls = w.letters();
      ls.push_back(c);
      all.emplace_back(2, std::move(ls));
    }
  }
  for (const Word& w : all) {
    if (w.length() > 6) continue;
    bool got = is_primitive(w);
    bool want = oracle.is_primitive(w);
    if (got != want) {
      CAPTURE(to_string(w));
      REQUIRE(got == want);
    }
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("primitivity invariances and exponent gcd") {
  std::mt19937_64 rng(20250808);
  for (int t = 0; t < 1500; ++t) {
    Word u(2), f(2);
    for (std::size_t i = 0, n = rng() % 9; i < n; ++i)
      u.push_reduced(static_cast<LetterCode>(rng() % 4));
    for (std::size_t i = 0, n = rng() % 4; i < n; ++i)
      f.push_reduced(static_cast<LetterCode>(rng() % 4));
    bool p = is_primitive(u);
    CHECK(is_primitive(conjugate(u, f)) == p);
    CHECK(is_primitive(invert(u)) == p);
    if (p) {
      long long gx = exponent_sum(u, 1), gy = exponent_sum(u, 2);
      CHECK(std::gcd(std::abs(gx), std::abs(gy)) == 1);
    }
  }
}
