#pragma once

#include <array>
#include <string>
#include <vector>

#include "accensus/word.hpp"

namespace accensus {

// Whitehead automorphism of the rank-2 free group, stored as the images of
// the generators. Type I permute the signed generators; Type II fix a
// multiplier letter a and send the other generator g to one of
// ga, a^-1 g, a^-1 g a.
struct WhiteheadAut {
  enum class Kind { TypeI, TypeII };
  Kind kind;
  std::array<Word, 2> images;  // images[g-1] = image of generator g+? (1-based g)

  std::string name() const {
    return "x->" + accensus::to_string(images[0]) +
           ",y->" + accensus::to_string(images[1]);
  }
};

inline Word apply_aut(const WhiteheadAut& a, const Word& w) {
  Word out(w.rank());
  for (LetterCode c : w.letters()) {
    const Word& img = a.images[static_cast<std::size_t>(generator_of(c) - 1)];
    if (sign_of(c) > 0) {
      for (LetterCode l : img.letters()) out.push_reduced(l);
    } else {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it)
        out.push_reduced(inverse_letter(*it));
    }
  }
  return out;
}

// All 8 Type I and all 12 non-identity Type II automorphisms. Fixed order;
// the greedy descent below always picks the first reducing one.
inline const std::vector<WhiteheadAut>& whitehead_auts(int rank) {
  if (rank != 2) throw std::invalid_argument("whitehead_auts supports rank 2 only");
  static const std::vector<WhiteheadAut> auts = [] {
    std::vector<WhiteheadAut> v;
    auto word1 = [](LetterCode c) { return Word(2, {c}); };
    // Type I: x -> a, y -> b over distinct generators
    for (LetterCode a = 0; a < 4; ++a)
      for (LetterCode b = 0; b < 4; ++b) {
        if (generator_of(a) == generator_of(b)) continue;
        v.push_back({WhiteheadAut::Kind::TypeI, {word1(a), word1(b)}});
      }
    // Type II: multiplier a, other generator g -> ga | a^-1 g | a^-1 g a
    for (LetterCode a = 0; a < 4; ++a) {
      int ga = generator_of(a);
      int g = ga == 1 ? 2 : 1;
      LetterCode gc = make_letter(g, +1);
      const Word ga_w(2, {gc, a});
      const Word ag_w(2, {inverse_letter(a), gc});
      const Word aga_w(2, {inverse_letter(a), gc, a});
      for (const Word& img : {ga_w, ag_w, aga_w}) {
        std::array<Word, 2> images{word1(make_letter(1, +1)), word1(make_letter(2, +1))};
        images[static_cast<std::size_t>(g - 1)] = img;
        v.push_back({WhiteheadAut::Kind::TypeII, images});
      }
    }
    return v;
  }();
  return auts;
}

struct MinimizationResult {
  Word minimal;                      // cyclically reduced orbit-minimal form
  std::vector<WhiteheadAut> applied; // the length-reducing steps, in order
};

// Greedy Whitehead descent on the cyclic core. Each step applies the first
// automorphism in the fixed order that strictly reduces cyclic length; by
// peak reduction the terminal length is the minimum over the whole
// automorphism orbit.
inline MinimizationResult minimize_cyclic_length(const Word& w) {
  MinimizationResult res{cyclic_reduce(w).core, {}};
  const auto& auts = whitehead_auts(w.rank());
  bool reduced = true;
  while (reduced && !res.minimal.empty()) {
    reduced = false;
    for (const WhiteheadAut& a : auts) {
      Word img = cyclic_reduce(apply_aut(a, res.minimal)).core;
      if (img.length() < res.minimal.length()) {
        res.minimal = std::move(img);
        res.applied.push_back(a);
        reduced = true;
        break;
      }
    }
  }
  return res;
}

// Primitive iff some automorphism maps w to a basis element, i.e. the
// orbit-minimal cyclic length is 1.
inline bool is_primitive(const Word& w) {
  if (w.rank() != 2) throw std::invalid_argument("is_primitive supports rank 2 only");
  return minimize_cyclic_length(w).minimal.length() == 1;
}

}  // namespace accensus
