#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <vector>

#include "accensus/presentation.hpp"

namespace accensus {

struct EnumerationResult {
  enum class Outcome { Finite, Exceeded };
  Outcome outcome = Outcome::Exceeded;
  long long order = 0;          // live cosets when the table closed
  long long cosets_defined = 0; // total definitions, dead ones included
  double wall_seconds = 0.0;

  bool finite() const { return outcome == Outcome::Finite; }
};

// HLT coset enumeration over the trivial subgroup, with eager union-find
// coincidence processing. One instance per enumeration; internally
// mutable, no shared state between instances.
class CosetTable {
 public:
  CosetTable(const Presentation& p, long long max_cosets)
      : ncols_(2 * p.rank()), max_cosets_(max_cosets) {
    if (max_cosets < 1) throw std::invalid_argument("max_cosets must be >= 1");
    for (const Word& w : p.relators()) {
      if (w.empty()) continue;  // empty relator scans close vacuously
      relators_.push_back(w.letters());
    }
    rows_.push_back(Row(ncols_, kUndef));
    parent_.push_back(0);
    ++defined_;
  }

  EnumerationResult enumerate() {
    auto start = std::chrono::steady_clock::now();
    EnumerationResult res;
    bool exceeded = false;
    // Passes repeat until one completes with no definitions and no
    // coincidences; eager coincidence processing can poke holes in rows
    // already visited, so a single sweep is not enough in general.
    while (!exceeded) {
      long long before = defined_ + merges_;
      for (std::size_t c = 0; c < rows_.size() && !exceeded; ++c) {
        if (!alive(c)) continue;
        for (const auto& rel : relators_) {
          if (!scan_and_fill(c, rel)) {
            exceeded = true;
            break;
          }
          if (!alive(c)) break;
        }
        if (exceeded || !alive(c)) continue;
        for (int g = 0; g < ncols_; ++g)
          if (rows_[c][g] == kUndef && !define(c, g)) {
            exceeded = true;
            break;
          }
      }
      if (!exceeded && defined_ + merges_ == before) break;
    }
    res.cosets_defined = defined_;
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (exceeded) {
      res.outcome = EnumerationResult::Outcome::Exceeded;
      return res;
    }
    res.outcome = EnumerationResult::Outcome::Finite;
    res.order = live_count();
    return res;
  }

  // --- inspection helpers ---
  bool alive(std::size_t c) const { return parent_[c] == c; }
  long long live_count() const {
    long long n = 0;
    for (std::size_t c = 0; c < rows_.size(); ++c)
      if (alive(c)) ++n;
    return n;
  }
  bool closed() const {
    for (std::size_t c = 0; c < rows_.size(); ++c) {
      if (!alive(c)) continue;
      for (int g = 0; g < ncols_; ++g)
        if (rows_[c][g] == kUndef) return false;
      for (const auto& rel : relators_) {
        std::size_t cur = c;
        for (LetterCode l : rel) {
          int32_t nxt = rows_[cur][l];
          if (nxt == kUndef) return false;
          cur = static_cast<std::size_t>(nxt);
        }
        if (cur != c) return false;
      }
    }
    return true;
  }
  // on a closed table every generator column permutes the live cosets
  bool columns_are_bijections() const {
    for (int g = 0; g < ncols_; ++g) {
      std::vector<char> hit(rows_.size(), 0);
      for (std::size_t c = 0; c < rows_.size(); ++c) {
        if (!alive(c)) continue;
        int32_t d = rows_[c][g];
        if (d == kUndef || !alive(static_cast<std::size_t>(d))) return false;
        if (hit[static_cast<std::size_t>(d)]) return false;
        hit[static_cast<std::size_t>(d)] = 1;
      }
    }
    return true;
  }

 private:
  static constexpr int32_t kUndef = -1;
  using Row = std::vector<int32_t>;

  std::size_t rep(std::size_t c) {
    while (parent_[c] != c) {
      parent_[c] = parent_[parent_[c]];
      c = parent_[c];
    }
    return c;
  }

  bool define(std::size_t c, int g) {
    if (defined_ >= max_cosets_) return false;
    std::size_t n = rows_.size();
    rows_.push_back(Row(ncols_, kUndef));
    parent_.push_back(n);
    ++defined_;
    rows_[c][g] = static_cast<int32_t>(n);
    rows_[n][g ^ 1] = static_cast<int32_t>(c);
    return true;
  }

  void merge(std::size_t a, std::size_t b) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // smaller index survives, so coset 1 never dies
    parent_[b] = a;
    ++merges_;
    queue_.push_back(b);
  }

  // Drains the coincidence queue, transplanting every entry of each dead
  // row onto the live representatives and queueing secondary coincidences.
  void process_coincidences() {
    while (!queue_.empty()) {
      std::size_t dead = queue_.front();
      queue_.pop_front();
      for (int g = 0; g < ncols_; ++g) {
        int32_t d32 = rows_[dead][g];
        if (d32 == kUndef) continue;
        std::size_t d = static_cast<std::size_t>(d32);
        rows_[d][g ^ 1] = kUndef;
        std::size_t mu = rep(dead), nu = rep(d);
        if (rows_[mu][g] != kUndef) {
          merge(nu, static_cast<std::size_t>(rows_[mu][g]));
        } else if (rows_[nu][g ^ 1] != kUndef) {
          merge(mu, static_cast<std::size_t>(rows_[nu][g ^ 1]));
        } else {
          rows_[mu][g] = static_cast<int32_t>(nu);
          rows_[nu][g ^ 1] = static_cast<int32_t>(mu);
        }
      }
    }
  }

  void coincide(std::size_t a, std::size_t b) {
    merge(a, b);
    process_coincidences();
  }

  // Scans relator w at coset c, filling gaps with new definitions (HLT
  // style); closes with a deduction or a coincidence. Returns false only
  // when the coset budget would be passed.
  bool scan_and_fill(std::size_t c, const std::vector<LetterCode>& w) {
    std::size_t f = c, b = c;
    long long i = 0, j = static_cast<long long>(w.size()) - 1;
    while (true) {
      while (i <= j && rows_[f][w[static_cast<std::size_t>(i)]] != kUndef) {
        f = static_cast<std::size_t>(rows_[f][w[static_cast<std::size_t>(i)]]);
        ++i;
      }
      if (i > j) {  // fully traced forward; the ends must agree
        if (f != b) coincide(f, b);
        return true;
      }
      while (j >= i && rows_[b][w[static_cast<std::size_t>(j)] ^ 1] != kUndef) {
        b = static_cast<std::size_t>(rows_[b][w[static_cast<std::size_t>(j)] ^ 1]);
        --j;
      }
      if (j < i) {  // scans met in the middle on distinct cosets
        coincide(f, b);
        return true;
      }
      if (i == j) {  // gap of one: deduction closes the cycle
        rows_[f][w[static_cast<std::size_t>(i)]] = static_cast<int32_t>(b);
        rows_[b][w[static_cast<std::size_t>(i)] ^ 1] = static_cast<int32_t>(f);
        return true;
      }
      if (!define(f, w[static_cast<std::size_t>(i)])) return false;
    }
  }

  int ncols_;
  long long max_cosets_;
  long long defined_ = 0;
  long long merges_ = 0;
  std::vector<std::vector<LetterCode>> relators_;
  std::vector<Row> rows_;
  std::vector<std::size_t> parent_;
  std::deque<std::size_t> queue_;
};

inline EnumerationResult enumerate_cosets(const Presentation& p,
                                          long long max_cosets = 50000) {
  CosetTable table(p, max_cosets);
  return table.enumerate();
}

}  // namespace accensus
