#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "accensus/abelianization.hpp"

using namespace accensus;

namespace {

Presentation P(const std::string& line) { return parse_presentation(line); }

// brute-force oracle for 2x2: invariant factors from gcd of entries and
// determinant, the closed form for 2x2 integer matrices
std::vector<long long> snf2_oracle(long long a, long long b, long long c,
                                   long long d) {
  auto g4 = std::gcd(std::gcd(std::abs(a), std::abs(b)),
                     std::gcd(std::abs(c), std::abs(d)));
  long long det = std::abs(a * d - b * c);
  if (g4 == 0) return {0, 0};
  if (det == 0) return {g4, 0};
  return {g4, det / g4};
}

}  // namespace

TEST_CASE("relation matrix") {
  IntMatrix m = relation_matrix(P("x y"));
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(0, 1) == 0);
  CHECK(m.at(1, 0) == 0);
  CHECK(m.at(1, 1) == 1);

  m = relation_matrix(P("xxYYY xyxYXY"));
  CHECK(m.at(0, 0) == 2);
  CHECK(m.at(0, 1) == -3);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(1, 1) == -1);

  m = relation_matrix(P("XyyxYYY YxxyXXX"));
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(0, 1) == -1);
  CHECK(m.at(1, 0) == -1);
  CHECK(m.at(1, 1) == 0);
}

TEST_CASE("smith normal form fixed cases") {
  IntMatrix id(2, 2);
  id.at(0, 0) = 1;
  id.at(1, 1) = 1;
  CHECK(smith_normal_form(id) == std::vector<long long>{1, 1});

  IntMatrix d23(2, 2);
  d23.at(0, 0) = 2;
  d23.at(1, 1) = 3;
  CHECK(smith_normal_form(d23) == std::vector<long long>{1, 6});

  IntMatrix z(2, 2);
  CHECK(smith_normal_form(z) == std::vector<long long>{0, 0});
}

TEST_CASE("smith normal form against 2x2 oracle") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 5000; ++t) {
    long long a = static_cast<long long>(rng() % 25) - 12;
    long long b = static_cast<long long>(rng() % 25) - 12;
    long long c = static_cast<long long>(rng() % 25) - 12;
    long long d = static_cast<long long>(rng() % 25) - 12;
    IntMatrix m(2, 2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    auto f = smith_normal_form(m);
    CHECK(f == snf2_oracle(a, b, c, d));
    if (f[0] != 0) CHECK(f[1] % f[0] == 0);
  }
}

TEST_CASE("3x3 divisibility property") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 2000; ++t) {
    IntMatrix m(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        m.at(r, c) = static_cast<long long>(rng() % 13) - 6;
    auto f = smith_normal_form(m);
    REQUIRE(f.size() == 3);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      CHECK(f[i] >= 0);
      if (f[i] == 0) CHECK(f[i + 1] == 0);
      if (f[i] != 0) CHECK(f[i + 1] % f[i] == 0);
    }
    // product of nonzero factors = |det| when det != 0
    long long det = m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
                    m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
                    m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
    if (det != 0) {
      long long prod = 1;
      for (long long x : f) prod *= x;
      CHECK(prod == std::abs(det));
    }
  }
}

TEST_CASE("trivial abelianization") {
  CHECK(has_trivial_abelianization(P("xxYYY xyxYXY")));
  CHECK(has_trivial_abelianization(P("XyyxYYY YxxyXXX")));
  CHECK_FALSE(has_trivial_abelianization(P("xx y")));
  CHECK(has_trivial_abelianization(P("x y")));

  // rank-2 shortcut: trivial iff |det| == 1
  std::mt19937_64 rng(555);
  for (int t = 0; t < 2000; ++t) {
    Word a(2), b(2);
    for (std::size_t i = 0, n = rng() % 7; i < n; ++i)
      a.push_reduced(static_cast<LetterCode>(rng() % 4));
    for (std::size_t i = 0, n = rng() % 7; i < n; ++i)
      b.push_reduced(static_cast<LetterCode>(rng() % 4));
    Presentation p(2, {a, b});
    IntMatrix m = relation_matrix(p);
    long long det = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    CHECK(has_trivial_abelianization(p) == (std::abs(det) == 1));
  }
}
