#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace accensus {

// A letter of a free group word, packed into one byte:
//   code = 2*(generator_index - 1) + (inverse ? 1 : 0)
// so for rank 2 the codes are x=0, X=1, y=2, Y=3, which is also the
// ordering used for all canonical comparisons.
using LetterCode = std::uint8_t;

inline constexpr LetterCode make_letter(int generator_index, int sign) {
  return static_cast<LetterCode>(2 * (generator_index - 1) + (sign < 0 ? 1 : 0));
}
inline constexpr LetterCode inverse_letter(LetterCode c) { return c ^ 1u; }
inline constexpr int generator_of(LetterCode c) { return (c >> 1) + 1; }
inline constexpr int sign_of(LetterCode c) { return (c & 1) ? -1 : +1; }

// Freely reduced word over a ranked basis. Immutable value type: every
// operation returns a new word, so words can be shared freely across
// threads.
class Word {
 public:
  explicit Word(int rank = 2) : rank_(check_rank(rank)) {}

  Word(int rank, std::vector<LetterCode> letters) : rank_(check_rank(rank)) {
    letters_.reserve(letters.size());
    for (LetterCode c : letters) push_reduced(c);
  }

  int rank() const { return rank_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::vector<LetterCode>& letters() const { return letters_; }
  LetterCode letter(std::size_t i) const { return letters_[i]; }

  bool operator==(const Word& o) const {
    return rank_ == o.rank_ && letters_ == o.letters_;
  }
  bool operator!=(const Word& o) const { return !(*this == o); }

  // Length-lexicographic order over letter codes; the total order used by
  // the census generation stream and by canonical forms.
  bool operator<(const Word& o) const {
    if (letters_.size() != o.letters_.size())
      return letters_.size() < o.letters_.size();
    return letters_ < o.letters_;
  }

  bool is_cyclically_reduced() const {
    return letters_.size() < 2 ||
           letters_.front() != inverse_letter(letters_.back());
  }

  // Internal builder used by the word operations below; keeps the word
  // freely reduced at every step.
  void push_reduced(LetterCode c) {
    if (generator_of(c) > rank_)
      throw std::invalid_argument("letter outside rank");
    if (!letters_.empty() && letters_.back() == inverse_letter(c))
      letters_.pop_back();
    else
      letters_.push_back(c);
  }

 private:
  static int check_rank(int rank) {
    if (rank < 1 || rank > 127) throw std::invalid_argument("bad rank");
    return rank;
  }

  int rank_;
  std::vector<LetterCode> letters_;
};

// --- text format -----------------------------------------------------------
//
// Rank <= 2 uses the compact alphabet: x, y generators, X, Y inverses, and
// the token "1" for the empty word. Higher ranks use x<N> / X<N> with
// 1-based indices, e.g. "x1X3x2".

inline Word parse_word(const std::string& text, int rank = 2) {
  Word w(rank);
  if (text == "1") return w;
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i++];
    int gen = 0;
    int sign = +1;
    if (ch == 'x' || ch == 'X') {
      gen = 1;
      sign = (ch == 'X') ? -1 : +1;
    } else if (ch == 'y' || ch == 'Y') {
      gen = 2;
      sign = (ch == 'Y') ? -1 : +1;
    } else {
      throw std::invalid_argument(std::string("unknown character '") + ch +
                                  "' in word");
    }
    if ((ch == 'x' || ch == 'X') && i < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[i]))) {
      gen = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
        gen = gen * 10 + (text[i++] - '0');
      if (gen == 0) throw std::invalid_argument("generator index 0");
    }
    if (gen > rank)
      throw std::invalid_argument("generator index exceeds rank");
    w.push_reduced(make_letter(gen, sign));
  }
  return w;
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  if (w.rank() <= 2) {
    for (LetterCode c : w.letters()) {
      static const char table[4] = {'x', 'X', 'y', 'Y'};
      out.push_back(table[c]);
    }
  } else {
    for (LetterCode c : w.letters()) {
      out.push_back(sign_of(c) > 0 ? 'x' : 'X');
      out += std::to_string(generator_of(c));
    }
  }
  return out;
}

// --- operations ------------------------------------------------------------

inline void require_same_rank(const Word& u, const Word& v) {
  if (u.rank() != v.rank()) throw std::invalid_argument("rank mismatch");
}

inline Word multiply(const Word& u, const Word& v) {
  require_same_rank(u, v);
  Word r = u;
  for (LetterCode c : v.letters()) r.push_reduced(c);
  return r;
}

inline Word invert(const Word& u) {
  Word r(u.rank());
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it)
    r.push_reduced(inverse_letter(*it));
  return r;
}

inline Word conjugate(const Word& u, const Word& f) {
  require_same_rank(u, f);
  Word r = f;
  for (LetterCode c : u.letters()) r.push_reduced(c);
  for (auto it = f.letters().rbegin(); it != f.letters().rend(); ++it)
    r.push_reduced(inverse_letter(*it));
  return r;
}

struct CyclicReduction {
  Word core;
  Word conjugator;  // conjugate(core, conjugator) == original word
};

inline CyclicReduction cyclic_reduce(const Word& u) {
  CyclicReduction r{Word(u.rank()), Word(u.rank())};
  std::size_t lo = 0, hi = u.length();
  std::vector<LetterCode> conj;
  while (hi - lo >= 2 && u.letter(lo) == inverse_letter(u.letter(hi - 1))) {
    conj.push_back(u.letter(lo));
    ++lo;
    --hi;
  }
  for (std::size_t i = lo; i < hi; ++i) r.core.push_reduced(u.letter(i));
  for (LetterCode c : conj) r.conjugator.push_reduced(c);
  return r;
}

inline long long exponent_sum(const Word& u, int generator_index) {
  if (generator_index < 1 || generator_index > u.rank())
    throw std::invalid_argument("generator index out of range");
  long long s = 0;
  for (LetterCode c : u.letters())
    if (generator_of(c) == generator_index) s += sign_of(c);
  return s;
}

// Rotation of a cyclically reduced word; stays freely reduced.
inline Word rotate(const Word& u, std::size_t k) {
  if (u.empty()) return u;
  k %= u.length();
  std::vector<LetterCode> out;
  out.reserve(u.length());
  for (std::size_t i = 0; i < u.length(); ++i)
    out.push_back(u.letter((i + k) % u.length()));
  return Word(u.rank(), std::move(out));
}

// Least rotation under the length-lex letter order. Input must be
// cyclically reduced.
inline Word least_rotation(const Word& u) {
  Word best = u;
  for (std::size_t k = 1; k < u.length(); ++k) {
    Word r = rotate(u, k);
    if (r < best) best = r;
  }
  return best;
}

// Distance between cyclic words: the length difference plus the best
// positionwise alignment of the shorter word (at offset 0) against all
// rotations of the longer one. Symmetric, zero exactly on equal-length
// rotation-equivalent words.
inline std::size_t cyclic_hamming(const Word& u, const Word& v) {
  require_same_rank(u, v);
  const Word& shorter = u.length() <= v.length() ? u : v;
  const Word& longer = u.length() <= v.length() ? v : u;
  std::size_t diff = longer.length() - shorter.length();
  if (longer.empty()) return 0;
  // doubled buffer keeps the rotation scan free of modulo arithmetic
  std::size_t n = longer.length();
  LetterCode doubled[64];
  const LetterCode* lp;
  std::vector<LetterCode> heap_doubled;
  if (n <= 32) {
    for (std::size_t i = 0; i < n; ++i)
      doubled[i] = doubled[i + n] = longer.letter(i);
    lp = doubled;
  } else {
    heap_doubled.reserve(2 * n);
    heap_doubled.insert(heap_doubled.end(), longer.letters().begin(),
                        longer.letters().end());
    heap_doubled.insert(heap_doubled.end(), longer.letters().begin(),
                        longer.letters().end());
    lp = heap_doubled.data();
  }
  std::size_t best = shorter.length();
  for (std::size_t rot = 0; rot < n; ++rot) {
    std::size_t mism = 0;
    const LetterCode* base = lp + rot;
    for (std::size_t i = 0; i < shorter.length(); ++i)
      mism += shorter.letter(i) != base[i];
    best = std::min(best, mism);
    if (best == 0) break;
  }
  return diff + best;
}

}  // namespace accensus
