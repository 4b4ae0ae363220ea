#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "accensus/abelianization.hpp"
#include "accensus/presentation.hpp"

using namespace accensus;

namespace {

Presentation P(const std::string& line) { return parse_presentation(line); }

Word random_cyc_word(std::mt19937_64& rng, std::size_t max_len) {
  while (true) {
    Word w(2);
    std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i)
      w.push_reduced(static_cast<LetterCode>(rng() % 4));
    if (!w.empty() && w.is_cyclically_reduced()) return w;
  }
}

ACMove random_move(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: {
      int i = 1 + static_cast<int>(rng() % 2);
      return ACMove::mul(i, 3 - i);
    }
    case 1:
      return ACMove::inv(1 + static_cast<int>(rng() % 2));
    default: {
      Word f(2);
      std::size_t len = 1 + rng() % 2;
      for (std::size_t i = 0; i < len; ++i)
        f.push_reduced(static_cast<LetterCode>(rng() % 4));
      if (f.empty()) f = parse_word("x", 2);
      return ACMove::conj(1 + static_cast<int>(rng() % 2), f);
    }
  }
}

}  // namespace

TEST_CASE("apply_move basics") {
  CHECK(to_string(apply_move(P("x y"), ACMove::mul(1, 2))) == "xy y");
  CHECK(to_string(apply_move(P("xy y"), ACMove::inv(1))) == "YX y");
  CHECK(to_string(apply_move(P("x y"), ACMove::conj(2, parse_word("x", 2)))) ==
        "x xyX");
  CHECK_THROWS_AS(apply_move(P("x y"), ACMove::mul(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(apply_move(P("x y"), ACMove::mul(0, 2)), std::invalid_argument);
  CHECK_THROWS_AS(apply_move(P("x y"), ACMove::inv(3)), std::invalid_argument);
}

TEST_CASE("total length") {
  CHECK(total_length(P("x y")) == 2);
  CHECK(total_length(P("xxxYYYY xyxYXY")) == 13);
  CHECK(total_length(P("xxYYY xyxYXY")) == 11);
}

TEST_CASE("neighbors of the standard presentation") {
  auto n0 = enumerate_neighbors(P("x y"), 0);
  std::set<std::string> tuples;
  for (auto& [m, q] : n0) tuples.insert(to_string(q));
  CHECK(tuples == std::set<std::string>{"xy y", "x yx", "X y", "x Y"});

  auto n1 = enumerate_neighbors(P("x y"), 1);
  std::set<std::string> tuples1;
  for (auto& [m, q] : n1) tuples1.insert(to_string(q));
  // adds the conjugation results, including the unchanged tuple itself
  CHECK(tuples1 == std::set<std::string>{"xy y", "x yx", "X y", "x Y", "x y",
                                         "yxY y", "Yxy y", "x xyX", "x Xyx"});
  CHECK(n1.size() <= 12);
}

TEST_CASE("local minimum test") {
  CHECK(is_local_min(P("xxxYYYY xyxYXY")));
  CHECK(is_local_min(P("xxYYY xyxYXY")));
  CHECK_FALSE(is_local_min(P("yxY y")));
  CHECK_FALSE(is_local_min(P("xY y")));  // Mul(1,2) shortens relator 1 to x
}

TEST_CASE("local min matches the neighbor enumeration") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    Presentation p(2, {random_cyc_word(rng, 5), random_cyc_word(rng, 5)});
    bool lm = is_local_min(p);
    bool any_shorter = false;
    for (int bound = 0; bound <= 2; ++bound)
      for (auto& [m, q] : enumerate_neighbors(p, bound))
        if (total_length(q) < total_length(p)) any_shorter = true;
    if (lm) CHECK_FALSE(any_shorter);
  }
}

TEST_CASE("conjugation of cyclically reduced relators never shortens") {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 500; ++t) {
    Presentation p(2, {random_cyc_word(rng, 6), random_cyc_word(rng, 6)});
    for (auto& [m, q] : enumerate_neighbors(p, 2))
      if (m.kind == ACMove::Kind::Conj)
        CHECK(total_length(q) >= total_length(p));
  }
}

TEST_CASE("canonical key invariances") {
  CHECK(canonical_key(P("yx y")) == canonical_key(P("xy y")));
  CHECK(canonical_key(P("y xy")) == canonical_key(P("xy y")));
  CHECK(canonical_key(P("x y")) != canonical_key(P("xy y")));
  CHECK_THROWS_AS(canonical_key(P("yxY y")), std::invalid_argument);

  std::mt19937_64 rng(5678);
  for (int t = 0; t < 500; ++t) {
    Word a = random_cyc_word(rng, 6), b = random_cyc_word(rng, 6);
    Presentation p(2, {a, b});
    std::string k = canonical_key(p);
    Presentation rot(2, {rotate(a, rng() % a.length()), rotate(b, rng() % b.length())});
    CHECK(canonical_key(rot) == k);
    Presentation swp(2, {b, a});
    CHECK(canonical_key(swp) == k);
    // inversion is only merged when the key options say so
    Presentation inv1(2, {invert(a), b});
    KeyOptions with_inv{true, true};
    CHECK(canonical_key(inv1, with_inv) == canonical_key(p, with_inv));
  }
  // the default key distinguishes a relator from its inverse when the
  // inverse is not a rotation
  Presentation q = P("xxyy y");
  Presentation qi(2, {invert(parse_word("xxyy", 2)), parse_word("y", 2)});
  CHECK(canonical_key(q) != canonical_key(qi));
  KeyOptions with_inv{true, true};
  CHECK(canonical_key(q, with_inv) == canonical_key(qi, with_inv));
}

TEST_CASE("moves are invertible by move sequences") {
  std::mt19937_64 rng(424242);
  for (int t = 0; t < 1000; ++t) {
    Presentation p(2, {random_cyc_word(rng, 6), random_cyc_word(rng, 6)});
    ACMove m = random_move(rng);
    Presentation q = apply_move(p, m);
    for (const ACMove& im : inverse_moves(m)) q = apply_move(q, im);
    CHECK(q == p);
  }
}

TEST_CASE("moves preserve the Smith normal form of the relation matrix") {
  std::mt19937_64 rng(31337);
  for (int t = 0; t < 400; ++t) {
    Presentation p(2, {random_cyc_word(rng, 6), random_cyc_word(rng, 6)});
    auto before = invariant_factors(p);
    Presentation q = p;
    for (int k = 0; k < 8; ++k) q = apply_move(q, random_move(rng));
    CHECK(invariant_factors(q) == before);
  }
}

TEST_CASE("certificate verify and round trip") {
  Certificate c{P("xy y"),
                P("x y"),
                {ACMove::inv(2), ACMove::mul(1, 2), ACMove::inv(2)}};
  CHECK(verify_certificate(c));

  Certificate id{P("x y"), P("x y"), {}};
  CHECK(verify_certificate(id));

  Certificate bad{P("x y"), P("x y"), {ACMove::inv(1)}};
  CHECK_FALSE(verify_certificate(bad));

  Certificate malformed{P("x y"), P("x y"), {ACMove::mul(1, 7)}};
  CHECK_THROWS_AS(verify_certificate(malformed), std::invalid_argument);

  std::string text = to_string(c);
  Certificate back = parse_certificate(text);
  CHECK(back.base == c.base);
  CHECK(back.claimed_target == c.claimed_target);
  CHECK(back.moves.size() == c.moves.size());
  CHECK(verify_certificate(back));
}

TEST_CASE("random certificates replay") {
  std::mt19937_64 rng(777);
  for (int t = 0; t < 2000; ++t) {
    Presentation base(2, {random_cyc_word(rng, 5), random_cyc_word(rng, 5)});
    std::vector<ACMove> moves;
    Presentation cur = base;
    std::size_t n = rng() % 12;
    for (std::size_t k = 0; k < n; ++k) {
      ACMove m = random_move(rng);
      moves.push_back(m);
      cur = apply_move(cur, m);
    }
    Certificate c{base, cur, moves};
    CHECK(verify_certificate(c));
    Certificate reparsed = parse_certificate(to_string(c));
    CHECK(verify_certificate(reparsed));
  }
}
