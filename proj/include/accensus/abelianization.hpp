#pragma once

#include <cstdlib>
#include <vector>

#include "accensus/presentation.hpp"

namespace accensus {

struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<long long> entries;  // row-major

  IntMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c, 0) {
    if (r <= 0 || c <= 0) throw std::invalid_argument("bad matrix dimensions");
  }
  long long& at(int r, int c) { return entries[static_cast<std::size_t>(r) * cols + c]; }
  long long at(int r, int c) const { return entries[static_cast<std::size_t>(r) * cols + c]; }
};

// Exponent-sum matrix of the relators: entry (i, g) is the signed count of
// generator g in relator i.
inline IntMatrix relation_matrix(const Presentation& p) {
  IntMatrix m(p.rank(), p.rank());
  for (int i = 0; i < p.rank(); ++i)
    for (int g = 1; g <= p.rank(); ++g)
      m.at(i, g - 1) = exponent_sum(p.relator(i), g);
  return m;
}

// Invariant factors d1 | d2 | ... (trailing zeros for rank deficiency) by
// elementary integer row/column operations, pivoting on the smallest
// nonzero absolute value. Entries here never exceed the relator length,
// so plain 64-bit arithmetic is ample.
inline std::vector<long long> smith_normal_form(IntMatrix m) {
  const int n = std::min(m.rows, m.cols);
  std::vector<long long> factors(static_cast<std::size_t>(n), 0);
  int t = 0;
  while (t < n) {
    // find smallest nonzero |entry| in the remaining block
    int pr = -1, pc = -1;
    long long best = 0;
    for (int r = t; r < m.rows; ++r)
      for (int c = t; c < m.cols; ++c) {
        long long v = m.at(r, c) < 0 ? -m.at(r, c) : m.at(r, c);
        if (v != 0 && (pr < 0 || v < best)) {
          pr = r;
          pc = c;
          best = v;
        }
      }
    if (pr < 0) break;  // block is zero; remaining factors stay 0
    // move pivot to (t, t)
    if (pr != t)
      for (int c = 0; c < m.cols; ++c) std::swap(m.at(pr, c), m.at(t, c));
    if (pc != t)
      for (int r = 0; r < m.rows; ++r) std::swap(m.at(r, pc), m.at(r, t));
    // clear row and column by division with remainder; restart if a
    // remainder smaller than the pivot appears
    bool clean = true;
    for (int r = t + 1; r < m.rows; ++r) {
      long long q = m.at(r, t) / m.at(t, t);
      if (q != 0)
        for (int c = t; c < m.cols; ++c) m.at(r, c) -= q * m.at(t, c);
      if (m.at(r, t) != 0) clean = false;
    }
    for (int c = t + 1; c < m.cols; ++c) {
      long long q = m.at(t, c) / m.at(t, t);
      if (q != 0)
        for (int r = t; r < m.rows; ++r) m.at(r, c) -= q * m.at(r, t);
      if (m.at(t, c) != 0) clean = false;
    }
    if (!clean) continue;
    // enforce divisibility into the rest of the block
    bool divides_all = true;
    for (int r = t + 1; r < m.rows && divides_all; ++r)
      for (int c = t + 1; c < m.cols && divides_all; ++c)
        if (m.at(r, c) % m.at(t, t) != 0) {
          // fold the offending row into row t and redo the pivot step
          for (int cc = t; cc < m.cols; ++cc) m.at(t, cc) += m.at(r, cc);
          divides_all = false;
        }
    if (!divides_all) continue;
    factors[static_cast<std::size_t>(t)] = m.at(t, t) < 0 ? -m.at(t, t) : m.at(t, t);
    ++t;
  }
  return factors;
}

inline std::vector<long long> invariant_factors(const Presentation& p) {
  return smith_normal_form(relation_matrix(p));
}

// G/[G,G] trivial iff every invariant factor is 1; for rank 2 this is the
// same as |det| = 1 of the 2x2 exponent matrix.
inline bool has_trivial_abelianization(const Presentation& p) {
  for (long long d : invariant_factors(p))
    if (d != 1) return false;
  return true;
}

}  // namespace accensus
