#pragma once

#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "accensus/word.hpp"

namespace accensus {

// Balanced presentation: rank generators, exactly rank relators, every
// relator freely reduced (Word maintains that on its own).
class Presentation {
 public:
  Presentation(int rank, std::vector<Word> relators)
      : rank_(rank), relators_(std::move(relators)) {
    if (static_cast<int>(relators_.size()) != rank_)
      throw std::invalid_argument("presentation is not balanced");
    for (const Word& w : relators_)
      if (w.rank() != rank_)
        throw std::invalid_argument("relator rank mismatch");
  }

  int rank() const { return rank_; }
  const std::vector<Word>& relators() const { return relators_; }
  const Word& relator(int i) const { return relators_[i]; }  // 0-based

  bool operator==(const Presentation& o) const {
    return rank_ == o.rank_ && relators_ == o.relators_;
  }
  bool operator!=(const Presentation& o) const { return !(*this == o); }

  // Generation-stream order: total length, then relators length-lex.
  bool operator<(const Presentation& o) const {
    std::size_t a = 0, b = 0;
    for (const Word& w : relators_) a += w.length();
    for (const Word& w : o.relators_) b += w.length();
    if (a != b) return a < b;
    for (int i = 0; i < rank_; ++i) {
      if (relators_[i] != o.relators_[i]) return relators_[i] < o.relators_[i];
    }
    return false;
  }

  Presentation with_relator(int index0, Word w) const {
    std::vector<Word> rel = relators_;
    rel[static_cast<std::size_t>(index0)] = std::move(w);
    return Presentation(rank_, std::move(rel));
  }

 private:
  int rank_;
  std::vector<Word> relators_;
};

inline std::size_t total_length(const Presentation& p) {
  std::size_t n = 0;
  for (const Word& w : p.relators()) n += w.length();
  return n;
}

// Presentation line: relators separated by single spaces, e.g.
// "xxYYY xyxYXY". Rank is the number of relators.
inline Presentation parse_presentation(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  if (toks.empty()) throw std::invalid_argument("empty presentation line");
  int rank = static_cast<int>(toks.size());
  std::vector<Word> rel;
  rel.reserve(toks.size());
  for (const std::string& s : toks) rel.push_back(parse_word(s, rank));
  return Presentation(rank, std::move(rel));
}

inline std::string to_string(const Presentation& p) {
  std::string out;
  for (int i = 0; i < p.rank(); ++i) {
    if (i) out.push_back(' ');
    out += to_string(p.relator(i));
  }
  return out;
}

// --- elementary AC-transformations -----------------------------------------

struct ACMove {
  enum class Kind { Mul, Inv, Conj };
  Kind kind;
  int i = 0;          // 1-based target relator
  int j = 0;          // 1-based source relator (Mul only)
  Word conjugator{2}; // Conj only

  static ACMove mul(int i, int j) { return {Kind::Mul, i, j, Word(2)}; }
  static ACMove inv(int i) { return {Kind::Inv, i, 0, Word(2)}; }
  static ACMove conj(int i, Word f) { return {Kind::Conj, i, 0, std::move(f)}; }

  bool operator==(const ACMove& o) const {
    return kind == o.kind && i == o.i && j == o.j &&
           (kind != Kind::Conj || conjugator == o.conjugator);
  }
};

inline Presentation apply_move(const Presentation& p, const ACMove& m) {
  if (m.i < 1 || m.i > p.rank())
    throw std::invalid_argument("move index i out of range");
  int i0 = m.i - 1;
  switch (m.kind) {
    case ACMove::Kind::Mul: {
      if (m.j < 1 || m.j > p.rank())
        throw std::invalid_argument("move index j out of range");
      if (m.j == m.i) throw std::invalid_argument("Mul requires i != j");
      return p.with_relator(i0, multiply(p.relator(i0), p.relator(m.j - 1)));
    }
    case ACMove::Kind::Inv:
      return p.with_relator(i0, invert(p.relator(i0)));
    case ACMove::Kind::Conj: {
      Word f = m.conjugator.rank() == p.rank()
                   ? m.conjugator
                   : Word(p.rank(), m.conjugator.letters());
      return p.with_relator(i0, conjugate(p.relator(i0), f));
    }
  }
  throw std::logic_error("unreachable");
}

// Inverse of a move as a move sequence (Mul needs three moves).
inline std::vector<ACMove> inverse_moves(const ACMove& m) {
  switch (m.kind) {
    case ACMove::Kind::Mul:
      return {ACMove::inv(m.j), ACMove::mul(m.i, m.j), ACMove::inv(m.j)};
    case ACMove::Kind::Inv:
      return {ACMove::inv(m.i)};
    case ACMove::Kind::Conj:
      return {ACMove::conj(m.i, invert(m.conjugator))};
  }
  throw std::logic_error("unreachable");
}

inline std::vector<ACMove> inverse_sequence(const std::vector<ACMove>& moves) {
  std::vector<ACMove> out;
  for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
    std::vector<ACMove> inv = inverse_moves(*it);
    out.insert(out.end(), inv.begin(), inv.end());
  }
  return out;
}

// Enumerates all freely reduced nonempty words of length in [1, max_len];
// used for conjugator sampling and neighbor enumeration. Length-lex order.
inline std::vector<Word> all_reduced_words(int rank, int max_len,
                                           int min_len = 1) {
  std::vector<Word> out;
  std::vector<Word> frontier{Word(rank)};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      for (LetterCode c = 0; c < 2 * rank; ++c) {
        if (!w.empty() && w.letters().back() == inverse_letter(c)) continue;
        std::vector<LetterCode> ls = w.letters();
        ls.push_back(c);
        next.emplace_back(rank, std::move(ls));
      }
    }
    frontier = next;
    if (len >= min_len)
      out.insert(out.end(), next.begin(), next.end());
  }
  return out;
}

// One-move neighborhood with conjugators up to the given length,
// deduplicated by resulting relator tuple (first move producing a tuple
// wins). Deterministic order: Mul, Inv, then Conj by (i, conjugator).
inline std::vector<std::pair<ACMove, Presentation>> enumerate_neighbors(
    const Presentation& p, int conjugator_bound) {
  std::vector<std::pair<ACMove, Presentation>> out;
  std::vector<std::string> seen;
  auto emit = [&](const ACMove& m) {
    Presentation q = apply_move(p, m);
    std::string key = to_string(q);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      out.emplace_back(m, std::move(q));
    }
  };
  for (int i = 1; i <= p.rank(); ++i)
    for (int j = 1; j <= p.rank(); ++j)
      if (i != j) emit(ACMove::mul(i, j));
  for (int i = 1; i <= p.rank(); ++i) emit(ACMove::inv(i));
  if (conjugator_bound >= 1) {
    std::vector<Word> fs = all_reduced_words(p.rank(), conjugator_bound);
    for (int i = 1; i <= p.rank(); ++i)
      for (const Word& f : fs) emit(ACMove::conj(i, f));
  }
  return out;
}

// Potential-counterexample test: no elementary transformation decreases
// the total relator length. Inv never changes length, a conjugation can
// decrease a relator iff the relator is not cyclically reduced, so only
// the Mul moves need an explicit scan.
inline bool is_local_min(const Presentation& p) {
  for (const Word& w : p.relators())
    if (!w.is_cyclically_reduced()) return false;
  for (int i = 0; i < p.rank(); ++i)
    for (int j = 0; j < p.rank(); ++j) {
      if (i == j) continue;
      if (multiply(p.relator(i), p.relator(j)).length() < p.relator(i).length())
        return false;
    }
  return true;
}

// --- canonical key ----------------------------------------------------------

// Symmetries folded into the dedup key. Every one of them is realizable by
// AC-moves: rotation of a cyclically reduced relator is a conjugation,
// inversion is AC2, and a tuple swap is a short Mul/Inv sequence. The
// default (rotations and swap) reproduces the published census class
// counts; inversion merges 4x further and is kept as an option.
struct KeyOptions {
  bool swap_relators = true;
  bool invert_relators = false;
};

inline Word canonical_cyclic_form(const Word& w, bool allow_inverse) {
  Word best = least_rotation(w);
  if (allow_inverse) {
    Word inv_best = least_rotation(invert(w));
    if (inv_best < best) best = inv_best;
  }
  return best;
}

// Lexicographically least representative over the enabled symmetry set.
// Requires cyclically reduced relators.
inline std::string canonical_key(const Presentation& p,
                                 const KeyOptions& opts = KeyOptions{}) {
  std::vector<std::string> parts;
  parts.reserve(p.relators().size());
  for (const Word& w : p.relators()) {
    if (!w.is_cyclically_reduced())
      throw std::invalid_argument("canonical_key requires cyclically reduced relators");
    parts.push_back(to_string(canonical_cyclic_form(w, opts.invert_relators)));
  }
  if (opts.swap_relators) {
    // compare on letter codes, not ASCII
    std::sort(parts.begin(), parts.end(), [&](const std::string& a, const std::string& b) {
      Word wa = parse_word(a, p.rank()), wb = parse_word(b, p.rank());
      return wa < wb;
    });
  }
  std::string key;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) key.push_back('|');
    key += parts[i];
  }
  return key;
}

// --- certificates ------------------------------------------------------------

struct Certificate {
  Presentation base;
  Presentation claimed_target;
  std::vector<ACMove> moves;
};

// Pure replay; true iff the move sequence takes base exactly to
// claimed_target (tuple equality, order and orientation included).
// Malformed moves surface as std::invalid_argument, distinct from a
// replay mismatch.
inline bool verify_certificate(const Certificate& c) {
  Presentation cur = c.base;
  for (const ACMove& m : c.moves) cur = apply_move(cur, m);
  return cur == c.claimed_target;
}

// Certificate text format:
//   base: <presentation line>
//   target: <presentation line>
//   inv <i> | mul <i> <j> | conj <i> <word>      (one move per line, 1-based)
inline std::string to_string(const Certificate& c) {
  std::string out = "base: " + to_string(c.base) + "\n";
  out += "target: " + to_string(c.claimed_target) + "\n";
  for (const ACMove& m : c.moves) {
    switch (m.kind) {
      case ACMove::Kind::Mul:
        out += "mul " + std::to_string(m.i) + " " + std::to_string(m.j) + "\n";
        break;
      case ACMove::Kind::Inv:
        out += "inv " + std::to_string(m.i) + "\n";
        break;
      case ACMove::Kind::Conj:
        out += "conj " + std::to_string(m.i) + " " + to_string(m.conjugator) + "\n";
        break;
    }
  }
  return out;
}

inline Certificate parse_certificate(std::istream& in) {
  std::string line;
  std::optional<Presentation> base, target;
  std::vector<ACMove> moves;
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string verb;
    ls >> verb;
    if (verb == "base:") {
      std::string rest;
      std::getline(ls, rest);
      base = parse_presentation(rest);
    } else if (verb == "target:") {
      std::string rest;
      std::getline(ls, rest);
      target = parse_presentation(rest);
    } else if (verb == "inv") {
      int i;
      if (!(ls >> i)) throw std::invalid_argument("bad inv line: " + line);
      moves.push_back(ACMove::inv(i));
    } else if (verb == "mul") {
      int i, j;
      if (!(ls >> i >> j)) throw std::invalid_argument("bad mul line: " + line);
      moves.push_back(ACMove::mul(i, j));
    } else if (verb == "conj") {
      int i;
      std::string wtext;
      if (!(ls >> i >> wtext))
        throw std::invalid_argument("bad conj line: " + line);
      int rank = base ? base->rank() : 2;
      moves.push_back(ACMove::conj(i, parse_word(wtext, rank)));
    } else {
      throw std::invalid_argument("unknown certificate line: " + line);
    }
  }
  if (!base || !target)
    throw std::invalid_argument("certificate missing base or target");
  return Certificate{*base, *target, std::move(moves)};
}

inline Certificate parse_certificate(const std::string& text) {
  std::istringstream in(text);
  return parse_certificate(in);
}

}  // namespace accensus
