#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "accensus/todd_coxeter.hpp"

using namespace accensus;

namespace {
Presentation P(const std::string& line) { return parse_presentation(line); }
}

TEST_CASE("tiny groups") {
  CHECK(enumerate_cosets(P("x y")).order == 1);
  CHECK(enumerate_cosets(P("xxx y")).order == 3);
  CHECK(enumerate_cosets(P("xxxxx y")).order == 5);
  // x = y^2, y^5 = 1
  CHECK(enumerate_cosets(P("xYY yyyyy")).order == 5);
  // y = x^2, y^2 x = 1 forces x^5 = 1
  CHECK(enumerate_cosets(P("xxY yyx")).order == 5);
  // presentations of the trivial group with nontrivial relators
  CHECK(enumerate_cosets(P("xxYYY xyxYXY")).order == 1);
  CHECK(enumerate_cosets(P("xxxYYYY xyxYXY")).order == 1);
  // infinite dihedral: the budget is a result, not an error
  CHECK(enumerate_cosets(P("xx yy"), 1000).outcome ==
        EnumerationResult::Outcome::Exceeded);
}

TEST_CASE("order 120 group") {
  auto r = enumerate_cosets(P("yxyXX xyxYYYY"), 50000);
  CHECK(r.finite());
  CHECK(r.order == 120);
  CHECK(r.wall_seconds < 5.0);
}

TEST_CASE("quaternion and dicyclic groups") {
  // x^2 = y^2 and xyx = y present Q8
  auto r = enumerate_cosets(P("xxYY xyxY"));
  CHECK(r.finite());
  CHECK(r.order == 8);
  // y^2 = x^3, y^-1 x y = x^-1: dicyclic of order 12
  auto d12 = enumerate_cosets(P("yyXXX Yxyx"));
  CHECK(d12.finite());
  CHECK(d12.order == 12);
  // Z/2 * Z/3 is infinite
  auto d = enumerate_cosets(P("xx yyy"), 20000);
  CHECK(d.outcome == EnumerationResult::Outcome::Exceeded);
}

TEST_CASE("determinism") {
  for (int t = 0; t < 3; ++t) {
    auto a = enumerate_cosets(P("yxyXX xyxYYYY"), 50000);
    auto b = enumerate_cosets(P("yxyXX xyxYYYY"), 50000);
    CHECK(a.order == b.order);
    CHECK(a.cosets_defined == b.cosets_defined);
  }
}

TEST_CASE("closed table is a permutation action") {
  CosetTable t(P("yxyXX xyxYYYY"), 50000);
  auto r = t.enumerate();
  REQUIRE(r.finite());
  CHECK(t.closed());
  CHECK(t.columns_are_bijections());
}

TEST_CASE("order invariant under AC moves") {
  std::mt19937_64 rng(12345);
  Presentation base = P("yxyXX xyxYYYY");
  for (int t = 0; t < 10; ++t) {
    Presentation q = base;
    for (int k = 0; k < 6; ++k) {
      ACMove m = ACMove::inv(1);
      switch (rng() % 3) {
        case 0: {
          int i = 1 + static_cast<int>(rng() % 2);
          m = ACMove::mul(i, 3 - i);
          break;
        }
        case 1:
          m = ACMove::inv(1 + static_cast<int>(rng() % 2));
          break;
        default: {
          Word f(2);
          f.push_reduced(static_cast<LetterCode>(rng() % 4));
          m = ACMove::conj(1 + static_cast<int>(rng() % 2), f);
          break;
        }
      }
      q = apply_move(q, m);
    }
    auto r = enumerate_cosets(q, 200000);
    REQUIRE(r.finite());
    CHECK(r.order == 120);
  }
}

TEST_CASE("budget boundary") {
  CHECK_THROWS_AS(enumerate_cosets(P("x y"), 0), std::invalid_argument);
  auto r = enumerate_cosets(P("yxyXX xyxYYYY"), 5);
  CHECK(r.outcome == EnumerationResult::Outcome::Exceeded);
  CHECK(r.cosets_defined <= 5);
}
