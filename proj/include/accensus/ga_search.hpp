#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "accensus/census.hpp"
#include "accensus/presentation.hpp"

namespace accensus {

inline Presentation standard_presentation(int rank = 2) {
  std::vector<Word> rel;
  for (int g = 1; g <= rank; ++g) rel.push_back(Word(rank, {make_letter(g, +1)}));
  return Presentation(rank, std::move(rel));
}

// --- fitness -----------------------------------------------------------------

inline long long fitness_length(const Presentation& p) {
  return static_cast<long long>(total_length(p));
}

// Sum of cyclic Hamming distances under the best relator pairing (identity
// or swap for rank 2).
inline long long fitness_hamming(const Presentation& p, const Presentation& target) {
  if (p.rank() != target.rank()) throw std::invalid_argument("rank mismatch");
  if (p.rank() != 2)
    throw std::invalid_argument("fitness_hamming supports rank 2 only");
  long long ident = static_cast<long long>(cyclic_hamming(p.relator(0), target.relator(0))) +
                    static_cast<long long>(cyclic_hamming(p.relator(1), target.relator(1)));
  long long swapped = static_cast<long long>(cyclic_hamming(p.relator(0), target.relator(1))) +
                      static_cast<long long>(cyclic_hamming(p.relator(1), target.relator(0)));
  return std::min(ident, swapped);
}

// --- deterministic endgame completion ------------------------------------------

// Moves taking a tuple of two distinct single-letter relators exactly to
// (x, y). The crossed case routes through the six-move swap sequence.
inline std::vector<ACMove> finish_to_standard(const Presentation& p) {
  if (p.rank() != 2 || p.relator(0).length() != 1 || p.relator(1).length() != 1)
    throw std::invalid_argument("finish_to_standard needs two single-letter relators");
  LetterCode a = p.relator(0).letter(0), b = p.relator(1).letter(0);
  if (generator_of(a) == generator_of(b))
    throw std::invalid_argument("relators do not generate the free group");
  std::vector<ACMove> moves;
  if (sign_of(a) < 0) moves.push_back(ACMove::inv(1));
  if (sign_of(b) < 0) moves.push_back(ACMove::inv(2));
  if (generator_of(a) == 2) {  // (y, x) -> (x, y)
    for (const ACMove& m :
         {ACMove::inv(2), ACMove::mul(1, 2), ACMove::inv(1), ACMove::mul(2, 1),
          ACMove::inv(2), ACMove::mul(1, 2)})
      moves.push_back(m);
  }
  return moves;
}

// --- packed tuples for breadth-first search ------------------------------------

namespace detail {

inline std::uint64_t pack_word(const Word& w) {
  if (w.length() > 28) throw std::invalid_argument("word too long to pack");
  std::uint64_t v = static_cast<std::uint64_t>(w.length()) << 56;
  for (std::size_t i = 0; i < w.length(); ++i)
    v |= static_cast<std::uint64_t>(w.letter(i)) << (2 * i);
  return v;
}

inline Word unpack_word(std::uint64_t v, int rank = 2) {
  std::size_t len = static_cast<std::size_t>(v >> 56);
  std::vector<LetterCode> ls(len);
  for (std::size_t i = 0; i < len; ++i)
    ls[i] = static_cast<LetterCode>((v >> (2 * i)) & 3u);
  return Word(rank, std::move(ls));
}

struct PackedPair {
  std::uint64_t a = 0, b = 0;
  bool operator==(const PackedPair& o) const { return a == o.a && b == o.b; }
};

struct PackedPairHash {
  std::size_t operator()(const PackedPair& p) const {
    std::uint64_t h = p.a * 0x9e3779b97f4a7c15ULL;
    h ^= (p.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return static_cast<std::size_t>(h * 0xbf58476d1ce4e5b9ULL);
  }
};

inline PackedPair pack_pair(const Presentation& p) {
  return {pack_word(p.relator(0)), pack_word(p.relator(1))};
}

inline Presentation unpack_pair(const PackedPair& pp) {
  return Presentation(2, {unpack_word(pp.a), unpack_word(pp.b)});
}

// fixed move universe for rank-2 searches: Mul both ways, Inv both, Conj by
// every nonempty word up to the conjugator bound
inline std::vector<ACMove> search_moves(int conjugator_bound) {
  std::vector<ACMove> moves{ACMove::mul(1, 2), ACMove::mul(2, 1), ACMove::inv(1),
                            ACMove::inv(2)};
  for (const Word& f : all_reduced_words(2, conjugator_bound))
    for (int i = 1; i <= 2; ++i) moves.push_back(ACMove::conj(i, f));
  return moves;
}

}  // namespace detail

// --- BFS oracle ---------------------------------------------------------------

struct BfsResult {
  enum class Status { Reachable, NotWithinBounds, MemoryCapExceeded };
  Status status = Status::NotWithinBounds;
  int min_moves = -1;

  bool reachable() const { return status == Status::Reachable; }
};

// Exhaustive breadth-first search over exact relator tuples, relator
// lengths capped. Reachable means the standard tuple (x, y) itself.
inline BfsResult bfs_oracle(const Presentation& start, int move_bound,
                            int length_cap, int conjugator_bound,
                            std::size_t max_states = 5000000) {
  if (start.rank() != 2) throw std::invalid_argument("bfs_oracle supports rank 2");
  if (move_bound < 0 || length_cap < 1 || conjugator_bound < 0 || length_cap > 28)
    throw std::invalid_argument("bad bfs bounds");
  for (const Word& w : start.relators())
    if (static_cast<int>(w.length()) > length_cap)
      return {BfsResult::Status::NotWithinBounds, -1};

  const detail::PackedPair target = detail::pack_pair(standard_presentation(2));
  detail::PackedPair s0 = detail::pack_pair(start);
  if (s0 == target) return {BfsResult::Status::Reachable, 0};

  std::vector<ACMove> moves = detail::search_moves(conjugator_bound);
  std::unordered_set<detail::PackedPair, detail::PackedPairHash> visited{s0};
  std::deque<detail::PackedPair> frontier{s0};
  for (int depth = 1; depth <= move_bound && !frontier.empty(); ++depth) {
    std::deque<detail::PackedPair> next;
    for (const detail::PackedPair& pp : frontier) {
      Presentation p = detail::unpack_pair(pp);
      for (const ACMove& m : moves) {
        Presentation q = apply_move(p, m);
        if (static_cast<int>(q.relator(0).length()) > length_cap ||
            static_cast<int>(q.relator(1).length()) > length_cap)
          continue;
        detail::PackedPair qq = detail::pack_pair(q);
        if (qq == target) return {BfsResult::Status::Reachable, depth};
        if (visited.size() >= max_states)
          return {BfsResult::Status::MemoryCapExceeded, -1};
        if (visited.insert(qq).second) next.push_back(qq);
      }
    }
    frontier = std::move(next);
  }
  return {BfsResult::Status::NotWithinBounds, -1};
}

// --- reachable-set table from the standard tuple --------------------------------

// Breadth-first closure of (x, y) under length-capped moves, with parent
// links, so membership gives an explicit move path from the standard
// tuple. Length-capped reachability is symmetric (every move inverts as a
// move sequence within the same caps), so membership certifies
// trivializability and the inverted path completes a certificate.
class StandardClosure {
 public:
  StandardClosure(int length_cap, int conjugator_bound, std::size_t max_states)
      : length_cap_(length_cap) {
    moves_ = detail::search_moves(conjugator_bound);
    detail::PackedPair root = detail::pack_pair(standard_presentation(2));
    index_.emplace(root, 0);
    entries_.push_back({root, 0, 0});
    std::size_t head = 0;
    while (head < entries_.size()) {
      if (entries_.size() >= max_states) {
        complete_ = false;
        break;
      }
      Entry cur = entries_[head];
      Presentation p = detail::unpack_pair(cur.key);
      for (std::size_t mi = 0; mi < moves_.size(); ++mi) {
        Presentation q = apply_move(p, moves_[mi]);
        if (static_cast<int>(q.relator(0).length()) > length_cap_ ||
            static_cast<int>(q.relator(1).length()) > length_cap_)
          continue;
        detail::PackedPair qq = detail::pack_pair(q);
        if (index_.emplace(qq, static_cast<std::uint32_t>(entries_.size())).second)
          entries_.push_back({qq, static_cast<std::uint32_t>(head),
                              static_cast<std::uint16_t>(mi)});
      }
      ++head;
    }
  }

  std::size_t size() const { return entries_.size(); }
  bool complete() const { return complete_; }
  int length_cap() const { return length_cap_; }

  bool contains(const Presentation& p) const {
    for (const Word& w : p.relators())
      if (static_cast<int>(w.length()) > length_cap_ || w.length() > 28)
        return false;
    return index_.count(detail::pack_pair(p)) > 0;
  }

  // moves from (x, y) to p; p must be contained
  std::vector<ACMove> path_from_standard(const Presentation& p) const {
    auto it = index_.find(detail::pack_pair(p));
    if (it == index_.end()) throw std::invalid_argument("tuple not in closure");
    std::vector<ACMove> rev;
    std::uint32_t idx = it->second;
    while (idx != 0) {
      const Entry& e = entries_[idx];
      rev.push_back(moves_[e.move]);
      idx = e.parent;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
  }

  // depth (number of moves) from the standard tuple
  int depth_of(const Presentation& p) const {
    auto it = index_.find(detail::pack_pair(p));
    if (it == index_.end()) return -1;
    int d = 0;
    std::uint32_t idx = it->second;
    while (idx != 0) {
      idx = entries_[idx].parent;
      ++d;
    }
    return d;
  }

 private:
  struct Entry {
    detail::PackedPair key;
    std::uint32_t parent;
    std::uint16_t move;
  };

  int length_cap_;
  bool complete_ = true;
  std::vector<ACMove> moves_;
  std::vector<Entry> entries_;
  std::unordered_map<detail::PackedPair, std::uint32_t, detail::PackedPairHash> index_;
};

// --- genetic search -------------------------------------------------------------

struct GAConfig {
  int population_size = 200;
  long long max_generations = 1000000;
  int tournament_size = 4;
  double mul_weight = 0.5;
  double inv_weight = 0.2;
  double conj_weight = 0.3;
  int conjugator_bound = 2;
  int max_relator_length = 20;
  int elitism = 4;
  long long stagnation_restart_after = 300;
  std::uint64_t rng_seed = 1;
  double wall_clock_budget = 30.0;  // seconds; 0 disables the wall check
  int islands = 1;

  void validate() const {
    if (population_size < 1 || elitism < 1 || population_size < elitism)
      throw std::invalid_argument("population_size >= elitism >= 1 required");
    if (tournament_size < 1 || max_relator_length < 1 || conjugator_bound < 0 ||
        islands < 1)
      throw std::invalid_argument("bad GA configuration");
  }
};

struct SearchMode {
  enum class Kind { Trivialize, Equivalence };
  Kind kind = Kind::Trivialize;
  std::optional<Presentation> target;

  static SearchMode trivialize() { return {Kind::Trivialize, std::nullopt}; }
  static SearchMode equivalence(Presentation t) {
    return {Kind::Equivalence, std::move(t)};
  }
};

namespace detail {
struct HistoryNode {
  ACMove move;
  std::shared_ptr<const HistoryNode> prev;
};
using HistoryPtr = std::shared_ptr<const HistoryNode>;

inline std::vector<ACMove> unwind(HistoryPtr h) {
  std::vector<ACMove> out;
  for (const HistoryNode* n = h.get(); n; n = n->prev.get()) out.push_back(n->move);
  std::reverse(out.begin(), out.end());
  return out;
}
}  // namespace detail

struct Individual {
  Presentation current;
  detail::HistoryPtr history;
  long long fitness = 0;
};

struct SearchOutcome {
  enum class Status { Success, BudgetExhausted };
  Status status = Status::BudgetExhausted;
  std::optional<Certificate> certificate;
  long long generations_used = 0;
  std::vector<long long> best_fitness_trace;

  bool success() const { return status == Status::Success; }
};

// One mutation: a single AC-move sampled from the configured mixture;
// resamples (bounded) when a relator would exceed the length cap, and
// returns the individual unchanged once resampling is exhausted.
inline Individual mutate(const Individual& ind, std::mt19937_64& rng,
                         const GAConfig& cfg,
                         const std::vector<Word>& conjugators) {
  const double total = cfg.mul_weight + cfg.inv_weight + cfg.conj_weight;
  for (int attempt = 0; attempt < 20; ++attempt) {
    double roll = static_cast<double>(rng() % 1000000) / 1000000.0 * total;
    ACMove m = ACMove::inv(1);
    int rank = ind.current.rank();
    if (roll < cfg.mul_weight) {
      int i = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(rank));
      int j = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(rank - 1));
      if (j >= i) ++j;
      m = ACMove::mul(i, j);
    } else if (roll < cfg.mul_weight + cfg.inv_weight) {
      m = ACMove::inv(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(rank)));
    } else {
      const Word& f = conjugators[rng() % conjugators.size()];
      m = ACMove::conj(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(rank)), f);
    }
    Presentation q = apply_move(ind.current, m);
    bool ok = true;
    for (const Word& w : q.relators())
      if (static_cast<int>(w.length()) > cfg.max_relator_length) ok = false;
    if (!ok) continue;
    return Individual{std::move(q),
                      std::make_shared<const detail::HistoryNode>(
                          detail::HistoryNode{std::move(m), ind.history}),
                      0};
  }
  return ind;
}

namespace detail {

class GAEngine {
 public:
  GAEngine(Presentation seed, SearchMode mode, GAConfig cfg,
           const StandardClosure* assist)
      : seed_(std::move(seed)), mode_(std::move(mode)), cfg_(std::move(cfg)),
        assist_(assist), rng_(cfg_.rng_seed) {
    cfg_.validate();
    if (mode_.kind == SearchMode::Kind::Equivalence && !mode_.target)
      throw std::invalid_argument("equivalence mode needs a target");
    conjugators_ = all_reduced_words(2, std::max(cfg_.conjugator_bound, 1));
  }

  // abort_below: best (generation, island) success seen elsewhere; used by
  // island racing to stop losers early without changing the winner
  SearchOutcome run(std::atomic<long long>* global_best_gen = nullptr) {
    auto started = std::chrono::steady_clock::now();
    SearchOutcome out;
    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(cfg_.population_size));
    Individual first{seed_, nullptr, 0};
    first.fitness = evaluate(first.current);
    for (int i = 0; i < cfg_.population_size; ++i) pop.push_back(first);

    if (auto cert = try_success(first)) {
      out.status = SearchOutcome::Status::Success;
      out.certificate = std::move(cert);
      out.generations_used = 0;
      out.best_fitness_trace.push_back(first.fitness);
      return out;
    }

    long long best = first.fitness;
    long long stagnant = 0;
    out.best_fitness_trace.push_back(best);

    for (long long gen = 1; gen <= cfg_.max_generations; ++gen) {
      if (cfg_.wall_clock_budget > 0 && (gen & 63) == 0) {
        double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
        if (elapsed > cfg_.wall_clock_budget) break;
      }
      if (global_best_gen && gen > global_best_gen->load(std::memory_order_relaxed))
        break;  // cannot win the island race any more

      std::stable_sort(pop.begin(), pop.end(),
                       [](const Individual& a, const Individual& b) {
                         return a.fitness < b.fitness;
                       });
      std::vector<Individual> next(pop.begin(), pop.begin() + cfg_.elitism);
      next.reserve(pop.size());
      while (next.size() < pop.size()) {
        const Individual& parent = tournament(pop);
        Individual child = mutate(parent, rng_, cfg_, conjugators_);
        child.fitness = evaluate(child.current);
        ++offspring_counter_;
        if ((offspring_counter_ & 0xfff) == 0) spot_check(child);
        if (auto cert = try_success(child)) {
          out.status = SearchOutcome::Status::Success;
          out.certificate = std::move(cert);
          out.generations_used = gen;
          out.best_fitness_trace.push_back(std::min(best, child.fitness));
          return out;
        }
        next.push_back(std::move(child));
      }
      pop = std::move(next);

      long long gen_best = pop.front().fitness;
      for (const Individual& ind : pop) gen_best = std::min(gen_best, ind.fitness);
      if (gen_best < best) {
        best = gen_best;
        stagnant = 0;
      } else {
        ++stagnant;
      }
      out.best_fitness_trace.push_back(best);

      if (cfg_.stagnation_restart_after > 0 &&
          stagnant >= cfg_.stagnation_restart_after) {
        restart(pop);
        stagnant = 0;
      }
      out.generations_used = gen;
    }
    return out;
  }

 private:
  long long evaluate(const Presentation& p) const {
    return mode_.kind == SearchMode::Kind::Trivialize
               ? fitness_length(p)
               : fitness_hamming(p, *mode_.target);
  }

  const Individual& tournament(const std::vector<Individual>& pop) {
    std::size_t winner = rng_() % pop.size();
    for (int k = 1; k < cfg_.tournament_size; ++k) {
      std::size_t c = rng_() % pop.size();
      if (pop[c].fitness < pop[winner].fitness ||
          (pop[c].fitness == pop[winner].fitness && c < winner))
        winner = c;
    }
    return pop[winner];
  }

  // keep the single best, rebuild the rest as mutation bursts off it
  void restart(std::vector<Individual>& pop) {
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) {
                       return a.fitness < b.fitness;
                     });
    Individual best = pop.front();
    for (std::size_t i = 1; i < pop.size(); ++i) {
      Individual ind = best;
      std::size_t burst = 1 + rng_() % 6;
      for (std::size_t k = 0; k < burst; ++k)
        ind = mutate(ind, rng_, cfg_, conjugators_);
      ind.fitness = evaluate(ind.current);
      pop[i] = std::move(ind);
    }
    pop[0] = std::move(best);
  }

  std::optional<Certificate> try_success(const Individual& ind) {
    if (mode_.kind == SearchMode::Kind::Trivialize) {
      if (fitness_length(ind.current) == 2 &&
          ind.current.relator(0).length() == 1 &&
          ind.current.relator(1).length() == 1 &&
          generator_of(ind.current.relator(0).letter(0)) !=
              generator_of(ind.current.relator(1).letter(0))) {
        std::vector<ACMove> moves = unwind(ind.history);
        for (const ACMove& m : finish_to_standard(ind.current)) moves.push_back(m);
        Certificate cert{seed_, standard_presentation(2), std::move(moves)};
        if (!verify_certificate(cert))
          throw std::logic_error("search produced an invalid certificate");
        return cert;
      }
      if (assist_ && assist_->contains(ind.current)) {
        std::vector<ACMove> moves = unwind(ind.history);
        for (const ACMove& m :
             inverse_sequence(assist_->path_from_standard(ind.current)))
          moves.push_back(m);
        Certificate cert{seed_, standard_presentation(2), std::move(moves)};
        if (!verify_certificate(cert))
          throw std::logic_error("closure stitching produced an invalid certificate");
        return cert;
      }
      return std::nullopt;
    }
    if (fitness_hamming(ind.current, *mode_.target) == 0) {
      Certificate cert{seed_, ind.current, unwind(ind.history)};
      if (!verify_certificate(cert))
        throw std::logic_error("search produced an invalid certificate");
      return cert;
    }
    return std::nullopt;
  }

  void spot_check(const Individual& ind) const {
    Presentation cur = seed_;
    for (const ACMove& m : unwind(ind.history)) cur = apply_move(cur, m);
    if (!(cur == ind.current))
      throw std::logic_error("individual history does not replay to its tuple");
  }

  Presentation seed_;
  SearchMode mode_;
  GAConfig cfg_;
  const StandardClosure* assist_;
  std::mt19937_64 rng_;
  std::vector<Word> conjugators_;
  std::uint64_t offspring_counter_ = 0;
};

}  // namespace detail

// Generational GA over AC-move sequences. Mutation-only reproduction,
// tournament selection, elitism, stagnation restarts. Islands run
// independently with derived seeds; the earliest success generation wins,
// lowest island index breaking ties.
inline SearchOutcome evolve(const Presentation& seed, const SearchMode& mode,
                            const GAConfig& cfg,
                            const StandardClosure* assist = nullptr) {
  cfg.validate();
  if (cfg.islands == 1) {
    detail::GAEngine engine(seed, mode, cfg, assist);
    return engine.run();
  }
  std::vector<SearchOutcome> results(static_cast<std::size_t>(cfg.islands));
  std::atomic<long long> best_gen{std::numeric_limits<long long>::max()};
  std::vector<std::thread> pool;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  for (unsigned t = 0; t < std::min<unsigned>(hw, static_cast<unsigned>(cfg.islands));
       ++t)
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < cfg.islands; k = next.fetch_add(1)) {
        GAConfig island_cfg = cfg;
        island_cfg.rng_seed = cfg.rng_seed + static_cast<std::uint64_t>(k);
        island_cfg.islands = 1;
        detail::GAEngine engine(seed, mode, island_cfg, assist);
        results[static_cast<std::size_t>(k)] = engine.run(&best_gen);
        if (results[static_cast<std::size_t>(k)].success()) {
          long long g = results[static_cast<std::size_t>(k)].generations_used;
          long long cur = best_gen.load();
          while (g < cur && !best_gen.compare_exchange_weak(cur, g)) {
          }
        }
      }
    });
  for (auto& th : pool) th.join();
  int winner = -1;
  for (int k = 0; k < cfg.islands; ++k) {
    if (!results[static_cast<std::size_t>(k)].success()) continue;
    if (winner < 0 || results[static_cast<std::size_t>(k)].generations_used <
                          results[static_cast<std::size_t>(winner)].generations_used)
      winner = k;
  }
  if (winner >= 0) return std::move(results[static_cast<std::size_t>(winner)]);
  // all exhausted: report the first island's outcome
  return std::move(results[0]);
}

}  // namespace accensus
