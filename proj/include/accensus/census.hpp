#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <string_view>
#include <thread>
#include <unordered_map>

#include "accensus/abelianization.hpp"
#include "accensus/gzio.hpp"
#include "accensus/presentation.hpp"
#include "accensus/todd_coxeter.hpp"
#include "accensus/whitehead.hpp"

namespace accensus {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

struct StageConfig {
  int max_total_length = 12;
  // default convention, pinned by the class counts: ordered pairs of
  // freely reduced relators, cyclic reduction NOT required at generation
  bool relators_cyclically_reduced = false;
  bool ordered_pairs = true;
  int min_relator_length = 1;
  long long coset_budget = 50000;
  int shard_count = 0;  // 0 = hardware concurrency
  std::string output_path;
  KeyOptions key{};
  int gzip_level = 6;
  int through_stage = 5;  // 3 = generation+filters, 4 = +dedup, 5 = +orders

  void validate() const {
    if (max_total_length < 2 * std::max(min_relator_length, 1))
      throw std::invalid_argument("max_total_length too small");
    if (min_relator_length < 0) throw std::invalid_argument("bad min length");
    if (shard_count < 0) throw std::invalid_argument("bad shard count");
    if (output_path.empty()) throw std::invalid_argument("output path required");
    if (through_stage < 3 || through_stage > 6)
      throw std::invalid_argument("through_stage must be in [3, 6]");
  }
  int effective_shards() const {
    if (shard_count > 0) return shard_count;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }
};

struct CensusRecord {
  std::string id;
  std::vector<std::string> relators;
  int stage_reached = 1;  // 1..5
  std::vector<long long> invariant_factors;
  std::vector<bool> primitive_flags;
  std::string canonical_key;
  long long order = 0;       // valid when order_known
  bool order_known = false;
  bool order_exceeded = false;
  long long exceeded_budget = 0;
  std::string ac_status;
  std::string certificate_ref;
};

// --- record JSON lines -------------------------------------------------------
// Hand-rolled formatting: the record shape is fixed and the census writes
// millions of lines, so this stays off the general-purpose JSON path.

inline void append_json_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
}

inline std::string format_record(const CensusRecord& r) {
  std::string o;
  o.reserve(160);
  o += "{\"id\":\"";
  o += r.id;
  o += "\",\"relators\":[";
  for (std::size_t i = 0; i < r.relators.size(); ++i) {
    if (i) o.push_back(',');
    o.push_back('"');
    append_json_escaped(o, r.relators[i]);
    o.push_back('"');
  }
  o += "],\"stage_reached\":\"L";
  o += std::to_string(r.stage_reached);
  o.push_back('"');
  if (!r.invariant_factors.empty()) {
    o += ",\"invariant_factors\":[";
    for (std::size_t i = 0; i < r.invariant_factors.size(); ++i) {
      if (i) o.push_back(',');
      o += std::to_string(r.invariant_factors[i]);
    }
    o.push_back(']');
  }
  if (!r.primitive_flags.empty()) {
    o += ",\"primitive_flags\":[";
    for (std::size_t i = 0; i < r.primitive_flags.size(); ++i) {
      if (i) o.push_back(',');
      o += r.primitive_flags[i] ? "true" : "false";
    }
    o.push_back(']');
  }
  if (!r.canonical_key.empty()) {
    o += ",\"canonical_key\":\"";
    append_json_escaped(o, r.canonical_key);
    o.push_back('"');
  }
  if (r.order_known) {
    o += ",\"order\":";
    o += std::to_string(r.order);
  } else if (r.order_exceeded) {
    o += ",\"order\":\"exceeded(";
    o += std::to_string(r.exceeded_budget);
    o += ")\"";
  }
  if (!r.ac_status.empty()) {
    o += ",\"ac_status\":\"";
    append_json_escaped(o, r.ac_status);
    o.push_back('"');
  }
  if (!r.certificate_ref.empty()) {
    o += ",\"certificate_ref\":\"";
    append_json_escaped(o, r.certificate_ref);
    o.push_back('"');
  }
  o.push_back('}');
  return o;
}

// Parser for the lines format_record writes (used by the report generator
// and the sweep; not a general JSON parser).
inline CensusRecord parse_record(std::string_view line) {
  CensusRecord r;
  auto find_str = [&](std::string_view field) -> std::string {
    std::string pat = "\"" + std::string(field) + "\":\"";
    auto p = line.find(pat);
    if (p == std::string_view::npos) return {};
    p += pat.size();
    std::string out;
    while (p < line.size() && line[p] != '"') {
      if (line[p] == '\\') ++p;
      out.push_back(line[p++]);
    }
    return out;
  };
  auto find_raw = [&](std::string_view field) -> std::string_view {
    std::string pat = "\"" + std::string(field) + "\":";
    auto p = line.find(pat);
    if (p == std::string_view::npos) return {};
    p += pat.size();
    auto e = p;
    int depth = 0;
    while (e < line.size()) {
      char c = line[e];
      if (c == '[') ++depth;
      if (c == ']') {
        if (depth == 0) break;
        --depth;
        if (depth == 0) {
          ++e;
          break;
        }
      }
      if (depth == 0 && (c == ',' || c == '}')) break;
      ++e;
    }
    return line.substr(p, e - p);
  };

  r.id = find_str("id");
  std::string_view rel = find_raw("relators");
  std::size_t p = 0;
  while ((p = rel.find('"', p)) != std::string_view::npos) {
    ++p;
    std::string w;
    while (p < rel.size() && rel[p] != '"') {
      if (rel[p] == '\\') ++p;
      w.push_back(rel[p++]);
    }
    ++p;
    r.relators.push_back(std::move(w));
  }
  std::string stage = find_str("stage_reached");
  if (stage.size() == 2 && stage[0] == 'L') r.stage_reached = stage[1] - '0';
  std::string_view inv = find_raw("invariant_factors");
  if (!inv.empty()) {
    long long v = 0;
    bool num = false, neg = false;
    for (char c : inv) {
      if (c == '-') neg = true;
      else if (c >= '0' && c <= '9') {
        v = v * 10 + (c - '0');
        num = true;
      } else if (num) {
        r.invariant_factors.push_back(neg ? -v : v);
        v = 0;
        num = false;
        neg = false;
      }
    }
  }
  std::string_view pf = find_raw("primitive_flags");
  for (std::size_t q = 0; q + 3 < pf.size(); ++q) {
    if (pf.compare(q, 4, "true") == 0) {
      r.primitive_flags.push_back(true);
      q += 3;
    } else if (pf.compare(q, 5, "false") == 0) {
      r.primitive_flags.push_back(false);
      q += 4;
    }
  }
  r.canonical_key = find_str("canonical_key");
  std::string_view ord = find_raw("order");
  if (!ord.empty()) {
    if (ord[0] == '"') {
      r.order_exceeded = true;
      auto open = ord.find('(');
      if (open != std::string_view::npos)
        r.exceeded_budget = std::atoll(std::string(ord.substr(open + 1)).c_str());
    } else {
      r.order_known = true;
      r.order = std::atoll(std::string(ord).c_str());
    }
  }
  r.ac_status = find_str("ac_status");
  r.certificate_ref = find_str("certificate_ref");
  return r;
}

// --- canonical text order ----------------------------------------------------

inline int letter_code_of_char(char c) {
  switch (c) {
    case 'x': return 0;
    case 'X': return 1;
    case 'y': return 2;
    case 'Y': return 3;
  }
  return 4;
}

inline std::size_t word_text_length(std::string_view w) {
  return w == "1" ? 0 : w.size();
}

inline int compare_word_text(std::string_view a, std::string_view b) {
  std::size_t la = word_text_length(a), lb = word_text_length(b);
  if (la != lb) return la < lb ? -1 : 1;
  for (std::size_t i = 0; i < la; ++i) {
    int ca = letter_code_of_char(a[i]), cb = letter_code_of_char(b[i]);
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

// generation-stream order on presentation text pairs
inline bool pair_text_less(std::string_view r1, std::string_view s1,
                           std::string_view r2, std::string_view s2) {
  std::size_t t1 = word_text_length(r1) + word_text_length(s1);
  std::size_t t2 = word_text_length(r2) + word_text_length(s2);
  if (t1 != t2) return t1 < t2;
  int c = compare_word_text(r1, r2);
  if (c != 0) return c < 0;
  return compare_word_text(s1, s2) < 0;
}

// extracts the two relator strings from a record line
inline std::pair<std::string_view, std::string_view> record_relators_view(
    std::string_view line) {
  auto p = line.find("\"relators\":[\"");
  if (p == std::string_view::npos) return {};
  p += 13;
  auto q = line.find('"', p);
  std::string_view r1 = line.substr(p, q - p);
  p = q + 3;  // skip ","
  q = line.find('"', p);
  return {r1, line.substr(p, q - p)};
}

// --- word table --------------------------------------------------------------

struct WordEntry {
  std::string text;
  int ex = 0, ey = 0;
  bool primitive = false;
  std::uint64_t shard_hash = 0;
};

class WordTable {
 public:
  WordTable(int max_len, bool cyclically_reduced, int min_len) {
    by_len_.resize(static_cast<std::size_t>(max_len) + 1);
    if (min_len == 0) {
      WordEntry e;
      e.text = "1";
      e.shard_hash = fnv1a64("1");
      by_len_[0].push_back(std::move(e));
    }
    for (int len = std::max(min_len, 1); len <= max_len; ++len)
      by_len_[static_cast<std::size_t>(len)] =
          generate_len(len, cyclically_reduced);
    // primitivity and canonical forms, split across threads
    std::vector<WordEntry*> all;
    for (auto& v : by_len_)
      for (auto& e : v)
        if (e.text != "1") all.push_back(&e);
    unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(64); i < all.size();
             i = next.fetch_add(64)) {
          for (std::size_t k = i; k < std::min(i + 64, all.size()); ++k) {
            WordEntry& e = *all[k];
            Word w = parse_word(e.text, 2);
            e.ex = static_cast<int>(exponent_sum(w, 1));
            e.ey = static_cast<int>(exponent_sum(w, 2));
            e.primitive = is_primitive(w);
            e.shard_hash = fnv1a64(e.text);
          }
        }
      });
    for (auto& th : pool) th.join();
  }

  const std::vector<WordEntry>& of_length(int len) const {
    return by_len_[static_cast<std::size_t>(len)];
  }
  int max_len() const { return static_cast<int>(by_len_.size()) - 1; }

 private:
  static std::vector<WordEntry> generate_len(int len, bool cyc) {
    std::vector<WordEntry> out;
    std::vector<LetterCode> cur(static_cast<std::size_t>(len), 0);
    static const char kAlpha[4] = {'x', 'X', 'y', 'Y'};
    // odometer in code order; keeps free reduction as digits advance
    int pos = 0;
    std::vector<int> digit(static_cast<std::size_t>(len), -1);
    while (pos >= 0) {
      if (pos == len) {
        bool ok = !cyc || len < 2 ||
                  cur[0] != inverse_letter(cur[static_cast<std::size_t>(len - 1)]);
        if (ok) {
          WordEntry e;
          e.text.resize(static_cast<std::size_t>(len));
          for (int i = 0; i < len; ++i)
            e.text[static_cast<std::size_t>(i)] = kAlpha[cur[static_cast<std::size_t>(i)]];
          out.push_back(std::move(e));
        }
        --pos;
        continue;
      }
      int d = ++digit[static_cast<std::size_t>(pos)];
      if (d >= 4) {
        digit[static_cast<std::size_t>(pos)] = -1;
        --pos;
        continue;
      }
      LetterCode c = static_cast<LetterCode>(d);
      if (pos > 0 && cur[static_cast<std::size_t>(pos - 1)] == inverse_letter(c))
        continue;
      cur[static_cast<std::size_t>(pos)] = c;
      ++pos;
    }
    return out;
  }

  std::vector<std::vector<WordEntry>> by_len_;
};

// --- pipeline ----------------------------------------------------------------

struct StageCounts {
  long long l1 = 0, l2 = 0, l3 = 0, l4 = 0, l5 = 0;
  long long died_stage2 = 0, died_stage3 = 0, collapsed = 0;
  long long nontrivial = 0, exceeded = 0;
};

struct CensusReport {
  StageCounts counts;
  std::vector<std::pair<std::string, long long>> nontrivial_orders;
  std::vector<std::string> exceeded_list;
  std::map<std::string, long long> ac_tally;
  double seconds_stage123 = 0, seconds_stage4 = 0, seconds_stage5 = 0,
         seconds_sweep = 0;
  StageConfig config;
};

namespace detail {

struct FatePartials {
  // closed-form SNF for the 2x2 exponent matrix; cross-checked against the
  // general elimination in the pipeline below
  static std::array<long long, 2> snf2(long long a, long long b, long long c,
                                       long long d) {
    long long g = std::gcd(std::gcd(std::abs(a), std::abs(b)),
                           std::gcd(std::abs(c), std::abs(d)));
    long long det = std::abs(a * d - b * c);
    if (g == 0) return {0, 0};
    if (det == 0) return {g, 0};
    return {g, det / g};
  }
};

inline std::string presentation_line(const std::string& r, const std::string& s) {
  std::string line;
  line.reserve(r.size() + s.size() + 1);
  line += r;
  line.push_back(' ');
  line += s;
  return line;
}

// k-way merge of per-shard sorted record files into one gz stream
inline void merge_sorted_files(const std::vector<std::string>& inputs,
                               const std::string& output, int gzip_level) {
  struct Head {
    std::unique_ptr<std::ifstream> in;
    std::string line;
    bool alive = false;
  };
  std::vector<Head> heads;
  for (const auto& path : inputs) {
    Head h;
    h.in = std::make_unique<std::ifstream>(path);
    if (!*h.in) throw std::runtime_error("cannot open shard file " + path);
    h.alive = static_cast<bool>(std::getline(*h.in, h.line));
    heads.push_back(std::move(h));
  }
  std::string tmp = output + ".tmp";
  {
    GzLineWriter out(tmp, gzip_level);
    while (true) {
      int best = -1;
      for (int i = 0; i < static_cast<int>(heads.size()); ++i) {
        if (!heads[static_cast<std::size_t>(i)].alive) continue;
        if (best < 0) {
          best = i;
          continue;
        }
        auto [r1, s1] = record_relators_view(heads[static_cast<std::size_t>(i)].line);
        auto [r2, s2] = record_relators_view(heads[static_cast<std::size_t>(best)].line);
        if (pair_text_less(r1, s1, r2, s2)) best = i;
      }
      if (best < 0) break;
      Head& h = heads[static_cast<std::size_t>(best)];
      out.write_line(h.line);
      h.alive = static_cast<bool>(std::getline(*h.in, h.line));
    }
    out.close();
  }
  std::filesystem::rename(tmp, output);
}

}  // namespace detail

class CensusPipeline {
 public:
  explicit CensusPipeline(StageConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
  }

  CensusReport run() {
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.output_path);
    check_or_write_manifest();

    CensusReport report;
    report.config = cfg_;

    auto t0 = std::chrono::steady_clock::now();
    run_stages_1_to_3();
    auto t1 = std::chrono::steady_clock::now();
    if (cfg_.through_stage >= 4) {
      auto candidates = load_candidates();
      dedup_stage4(candidates);
    }
    auto t2 = std::chrono::steady_clock::now();
    if (cfg_.through_stage >= 5) classify_stage5();
    auto t3 = std::chrono::steady_clock::now();

    report.counts = counts_;
    report.nontrivial_orders = nontrivial_orders_;
    report.exceeded_list = exceeded_list_;
    report.ac_tally["open"] = counts_.l5;
    report.seconds_stage123 = std::chrono::duration<double>(t1 - t0).count();
    report.seconds_stage4 = std::chrono::duration<double>(t2 - t1).count();
    report.seconds_stage5 = std::chrono::duration<double>(t3 - t2).count();
    write_report_files(report, cfg_.output_path);
    finalize_manifest(report);
    return report;
  }

  // --- paths ---
  std::string stage_file(int k) const {
    return cfg_.output_path + "/L" + std::to_string(k) + ".jsonl.gz";
  }
  std::string candidates_file() const {
    return cfg_.output_path + "/L3candidates.jsonl.gz";
  }
  std::string tmp_dir() const { return cfg_.output_path + "/tmp"; }

  // report rendering shared with the `report` CLI subcommand
  static void write_report_files(const CensusReport& r, const std::string& dir);
  static CensusReport rebuild_report_from_records(const StageConfig& cfg);

 private:
  void check_or_write_manifest() {
    namespace fs = std::filesystem;
    std::string path = cfg_.output_path + "/manifest.json";
    std::string want = manifest_config_line();
    if (fs::exists(path)) {
      std::ifstream in(path);
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      if (text.find(want) == std::string::npos)
        throw std::runtime_error(
            "output directory holds a census with a different configuration");
    } else {
      std::ofstream out(path);
      out << "{\n" << want << ",\n  \"stage123_done\": false\n}\n";
    }
  }

  std::string manifest_config_line() const {
    std::string s = "  \"config\": {\"max_total_length\": " +
                    std::to_string(cfg_.max_total_length) +
                    ", \"relators_cyclically_reduced\": " +
                    (cfg_.relators_cyclically_reduced ? "true" : "false") +
                    ", \"ordered_pairs\": " + (cfg_.ordered_pairs ? "true" : "false") +
                    ", \"min_relator_length\": " + std::to_string(cfg_.min_relator_length) +
                    ", \"coset_budget\": " + std::to_string(cfg_.coset_budget) +
                    ", \"key_swap\": " + (cfg_.key.swap_relators ? "true" : "false") +
                    ", \"key_invert\": " + (cfg_.key.invert_relators ? "true" : "false") +
                    "}";
    return s;
  }

  bool stage123_complete() const {
    namespace fs = std::filesystem;
    std::ifstream in(cfg_.output_path + "/manifest.json");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return text.find("\"stage123_done\": true") != std::string::npos &&
           fs::exists(stage_file(1)) && fs::exists(stage_file(2)) &&
           fs::exists(candidates_file());
  }

  void mark_stage123_done() {
    std::string path = cfg_.output_path + "/manifest.json";
    std::ofstream out(path);
    out << "{\n" << manifest_config_line() << ",\n  \"stage123_done\": true\n}\n";
  }

  // stages 1-3: generation, abelianization filter, primitivity filter;
  // sharded by hash of the first relator
  void run_stages_1_to_3();
  std::vector<std::pair<std::string, std::string>> load_candidates() const;
  void dedup_stage4(const std::vector<std::pair<std::string, std::string>>& cand);
  void classify_stage5();
  void finalize_manifest(const CensusReport& r);

  StageConfig cfg_;
  StageCounts counts_;
  std::vector<std::pair<std::string, long long>> nontrivial_orders_;
  std::vector<std::string> exceeded_list_;
  // survivors of stage 4 in canonical order, with their keys
  std::vector<std::pair<std::string, std::string>> reps_;  // (r, s)
  std::vector<std::string> rep_keys_;
};

inline void CensusPipeline::run_stages_1_to_3() {
  namespace fs = std::filesystem;
  if (stage123_complete()) {
    // counts still needed: stream the persisted files
    std::string line;
    for (int k : {1, 2}) {
      GzLineReader in(stage_file(k));
      long long n = 0;
      while (in.next_line(line)) ++n;
      if (k == 1) counts_.died_stage2 = n;
      if (k == 2) counts_.died_stage3 = n;
    }
    GzLineReader in(candidates_file());
    long long n = 0;
    while (in.next_line(line)) ++n;
    counts_.l3 = n;
    counts_.l1 = counts_.died_stage2 + counts_.died_stage3 + counts_.l3;
    counts_.l2 = counts_.died_stage3 + counts_.l3;
    return;
  }

  const int shards = cfg_.effective_shards();
  fs::create_directories(tmp_dir());
  {
    // shard temp layout depends on the shard count; wipe stale temps
    std::string marker = tmp_dir() + "/shards.txt";
    int prev = -1;
    {
      std::ifstream in(marker);
      in >> prev;
    }
    if (prev != shards) {
      fs::remove_all(tmp_dir());
      fs::create_directories(tmp_dir());
      std::ofstream out(marker);
      out << shards << "\n";
    }
  }
  WordTable table(cfg_.max_total_length - cfg_.min_relator_length,
                  cfg_.relators_cyclically_reduced, cfg_.min_relator_length);

  std::atomic<long long> total_l1{0}, total_d2{0}, total_d3{0}, total_l3{0};
  std::vector<std::thread> pool;
  for (int shard = 0; shard < shards; ++shard) {
    pool.emplace_back([&, shard] {
      std::string base = tmp_dir() + "/s" + std::to_string(shard);
      std::string done_marker = base + ".done";
      if (fs::exists(done_marker)) {
        // resumed shard: re-count from its files
        std::ifstream counts(done_marker);
        long long a, b, c, d;
        counts >> a >> b >> c >> d;
        total_l1 += a;
        total_d2 += b;
        total_d3 += c;
        total_l3 += d;
        return;
      }
      std::ofstream f1(base + ".L1.jsonl"), f2(base + ".L2.jsonl"),
          f3(base + ".cand.jsonl");
      long long n_l1 = 0, n_d2 = 0, n_d3 = 0, n_l3 = 0;
      std::string line;
      const int min_len = cfg_.min_relator_length;
      const int lo_total = min_len == 0 ? 0 : std::max(2 * min_len, 2);
      for (int total = lo_total; total <= cfg_.max_total_length; ++total) {
        for (int len_r = min_len; len_r <= total - min_len; ++len_r) {
          const auto& rs = table.of_length(len_r);
          const auto& ss = table.of_length(total - len_r);
          for (const WordEntry& r : rs) {
            if (static_cast<int>(r.shard_hash % static_cast<std::uint64_t>(shards)) !=
                shard)
              continue;
            for (const WordEntry& s : ss) {
              if (!cfg_.ordered_pairs && compare_word_text(s.text, r.text) < 0)
                continue;
              ++n_l1;
              long long det = static_cast<long long>(r.ex) * s.ey -
                              static_cast<long long>(r.ey) * s.ex;
              bool trivial_ab = det == 1 || det == -1;
              auto snf = detail::FatePartials::snf2(r.ex, r.ey, s.ex, s.ey);
              if (trivial_ab != (snf[0] == 1 && snf[1] == 1))
                throw std::logic_error("SNF / determinant disagreement");
              CensusRecord rec;
              rec.id = hex16(fnv1a64(detail::presentation_line(r.text, s.text)));
              rec.relators = {r.text, s.text};
              rec.invariant_factors = {snf[0], snf[1]};
              if (!trivial_ab) {
                rec.stage_reached = 1;
                ++n_d2;
                f1 << format_record(rec) << '\n';
                continue;
              }
              if (r.primitive || s.primitive) {
                rec.stage_reached = 2;
                rec.primitive_flags = {r.primitive, s.primitive};
                rec.ac_status = "standard";
                ++n_d3;
                f2 << format_record(rec) << '\n';
                continue;
              }
              ++n_l3;
              f3 << r.text << ' ' << s.text << '\n';
            }
          }
        }
      }
      f1.close();
      f2.close();
      f3.close();
      {
        std::ofstream done(done_marker);
        done << n_l1 << ' ' << n_d2 << ' ' << n_d3 << ' ' << n_l3 << '\n';
      }
      total_l1 += n_l1;
      total_d2 += n_d2;
      total_d3 += n_d3;
      total_l3 += n_l3;
    });
  }
  for (auto& t : pool) t.join();

  counts_.l1 = total_l1;
  counts_.died_stage2 = total_d2;
  counts_.died_stage3 = total_d3;
  counts_.l3 = total_l3;
  counts_.l2 = counts_.died_stage3 + counts_.l3;

  // merge shard files into the final per-stage records
  std::vector<std::string> in1, in2, in3;
  for (int shard = 0; shard < shards; ++shard) {
    std::string base = tmp_dir() + "/s" + std::to_string(shard);
    in1.push_back(base + ".L1.jsonl");
    in2.push_back(base + ".L2.jsonl");
    in3.push_back(base + ".cand.jsonl");
  }
  detail::merge_sorted_files(in1, stage_file(1), cfg_.gzip_level);
  detail::merge_sorted_files(in2, stage_file(2), cfg_.gzip_level);
  // candidate lines are bare presentation lines; wrap the comparator input
  {
    struct Head {
      std::unique_ptr<std::ifstream> in;
      std::string line;
      bool alive = false;
    };
    std::vector<Head> heads;
    for (const auto& path : in3) {
      Head h;
      h.in = std::make_unique<std::ifstream>(path);
      h.alive = static_cast<bool>(std::getline(*h.in, h.line));
      heads.push_back(std::move(h));
    }
    std::string tmp = candidates_file() + ".tmp";
    {
      GzLineWriter out(tmp, cfg_.gzip_level);
      auto split = [](const std::string& l) {
        auto sp = l.find(' ');
        return std::pair<std::string_view, std::string_view>(
            std::string_view(l).substr(0, sp), std::string_view(l).substr(sp + 1));
      };
      while (true) {
        int best = -1;
        for (int i = 0; i < static_cast<int>(heads.size()); ++i) {
          if (!heads[static_cast<std::size_t>(i)].alive) continue;
          if (best < 0) {
            best = i;
            continue;
          }
          auto [r1, s1] = split(heads[static_cast<std::size_t>(i)].line);
          auto [r2, s2] = split(heads[static_cast<std::size_t>(best)].line);
          if (pair_text_less(r1, s1, r2, s2)) best = i;
        }
        if (best < 0) break;
        out.write_line(heads[static_cast<std::size_t>(best)].line);
        heads[static_cast<std::size_t>(best)].alive = static_cast<bool>(
            std::getline(*heads[static_cast<std::size_t>(best)].in,
                         heads[static_cast<std::size_t>(best)].line));
      }
      out.close();
    }
    std::filesystem::rename(tmp, candidates_file());
  }
  mark_stage123_done();
  // shard temps are no longer needed
  std::error_code ec;
  fs::remove_all(tmp_dir(), ec);
}

inline std::vector<std::pair<std::string, std::string>>
CensusPipeline::load_candidates() const {
  std::vector<std::pair<std::string, std::string>> out;
  GzLineReader in(candidates_file());
  std::string line;
  while (in.next_line(line)) {
    auto sp = line.find(' ');
    out.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  return out;
}

inline void CensusPipeline::dedup_stage4(
    const std::vector<std::pair<std::string, std::string>>& cand) {
  reps_.clear();
  rep_keys_.clear();
  // keys are taken on the cyclic cores: conjugating a relator down to its
  // core is itself an AC-move, so the collapse stays within AC-classes
  auto core_key = [&](const Presentation& p) {
    std::vector<Word> cores;
    cores.reserve(p.relators().size());
    for (const Word& w : p.relators()) cores.push_back(cyclic_reduce(w).core);
    return canonical_key(Presentation(p.rank(), std::move(cores)), cfg_.key);
  };
  std::unordered_map<std::string, std::size_t> first_by_key;
  first_by_key.reserve(cand.size() * 2);
  std::vector<int> rep_index(cand.size(), -1);
  for (std::size_t i = 0; i < cand.size(); ++i) {
    Presentation p = parse_presentation(
        detail::presentation_line(cand[i].first, cand[i].second));
    std::string key = core_key(p);
    auto [it, inserted] = first_by_key.emplace(std::move(key), i);
    if (inserted) {
      rep_index[i] = static_cast<int>(reps_.size());
      reps_.push_back(cand[i]);
      rep_keys_.push_back(it->first);
    }
  }
  counts_.l4 = static_cast<long long>(reps_.size());
  counts_.collapsed = counts_.l3 - counts_.l4;

  // collapsed records, in canonical order
  std::string tmp = stage_file(3) + ".tmp";
  {
    GzLineWriter out(tmp, cfg_.gzip_level);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (rep_index[i] >= 0) continue;
      Presentation p = parse_presentation(
          detail::presentation_line(cand[i].first, cand[i].second));
      CensusRecord rec;
      rec.id = hex16(fnv1a64(detail::presentation_line(cand[i].first, cand[i].second)));
      rec.relators = {cand[i].first, cand[i].second};
      rec.stage_reached = 3;
      rec.invariant_factors = {1, 1};
      rec.primitive_flags = {false, false};
      rec.canonical_key = core_key(p);
      out.write_line(format_record(rec));
    }
    out.close();
  }
  std::filesystem::rename(tmp, stage_file(3));
}

inline void CensusPipeline::classify_stage5() {
  struct Outcome {
    bool finite = false;
    long long order = 0;
  };
  std::vector<Outcome> outcomes(reps_.size());
  unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < reps_.size();
           i = next.fetch_add(1)) {
        Presentation p = parse_presentation(
            detail::presentation_line(reps_[i].first, reps_[i].second));
        EnumerationResult r = enumerate_cosets(p, cfg_.coset_budget);
        outcomes[i] = {r.finite(), r.order};
      }
    });
  for (auto& th : pool) th.join();

  std::string tmp4 = stage_file(4) + ".tmp", tmp5 = stage_file(5) + ".tmp";
  {
    GzLineWriter out4(tmp4, cfg_.gzip_level);
    GzLineWriter out5(tmp5, cfg_.gzip_level);
    for (std::size_t i = 0; i < reps_.size(); ++i) {
      CensusRecord rec;
      std::string line = detail::presentation_line(reps_[i].first, reps_[i].second);
      rec.id = hex16(fnv1a64(line));
      rec.relators = {reps_[i].first, reps_[i].second};
      rec.invariant_factors = {1, 1};
      rec.primitive_flags = {false, false};
      rec.canonical_key = rep_keys_[i];
      if (!outcomes[i].finite) {
        rec.stage_reached = 4;
        rec.order_exceeded = true;
        rec.exceeded_budget = cfg_.coset_budget;
        ++counts_.exceeded;
        exceeded_list_.push_back(line);
        out4.write_line(format_record(rec));
      } else if (outcomes[i].order == 1) {
        rec.stage_reached = 5;
        rec.order_known = true;
        rec.order = 1;
        rec.ac_status = "open";
        ++counts_.l5;
        out5.write_line(format_record(rec));
      } else {
        rec.stage_reached = 4;
        rec.order_known = true;
        rec.order = outcomes[i].order;
        ++counts_.nontrivial;
        nontrivial_orders_.emplace_back(line, outcomes[i].order);
        out4.write_line(format_record(rec));
      }
    }
    out4.close();
    out5.close();
  }
  std::filesystem::rename(tmp4, stage_file(4));
  std::filesystem::rename(tmp5, stage_file(5));
}

inline void CensusPipeline::finalize_manifest(const CensusReport&) {
  // manifest already holds config + stage123 flag; nothing else to persist
}

inline void CensusPipeline::write_report_files(const CensusReport& r,
                                               const std::string& dir) {
  {
    std::ofstream out(dir + "/report.txt");
    out << "census report\n";
    out << "  max_total_length:  " << r.config.max_total_length << "\n";
    out << "  convention:        " << (r.config.ordered_pairs ? "ordered" : "unordered")
        << " pairs of nonempty, freely reduced"
        << (r.config.relators_cyclically_reduced ? ", cyclically reduced" : "")
        << " relators; min relator length " << r.config.min_relator_length << "\n";
    out << "  dedup key:         relator rotations"
        << (r.config.key.invert_relators ? " x relator inversion" : "")
        << (r.config.key.swap_relators ? " x tuple swap" : "") << "\n";
    out << "  coset budget:      " << r.config.coset_budget << "\n\n";
    out << "stage counts\n";
    out << "  L1 generated                 " << r.counts.l1 << "\n";
    out << "  L2 trivial abelianization    " << r.counts.l2 << "\n";
    out << "  L3 no primitive relator      " << r.counts.l3 << "\n";
    out << "  L4 canonical classes         " << r.counts.l4 << "\n";
    out << "  L5 trivial group             " << r.counts.l5 << "\n";
    out << "  nontrivial                   " << r.counts.nontrivial << "\n";
    out << "  exceeded                     " << r.counts.exceeded << "\n\n";
    if (!r.nontrivial_orders.empty()) {
      out << "nontrivial groups\n";
      for (auto& [line, order] : r.nontrivial_orders)
        out << "  " << line << "  order " << order << "\n";
      out << "\n";
    }
    if (!r.exceeded_list.empty()) {
      out << "budget exhausted\n";
      for (auto& line : r.exceeded_list) out << "  " << line << "\n";
      out << "\n";
    }
    out << "ac-status tally\n";
    for (auto& [k, v] : r.ac_tally) out << "  " << k << " " << v << "\n";
    out << "\ntimings\n";
    out << "  stages 1-3  " << r.seconds_stage123 << " s\n";
    out << "  stage 4     " << r.seconds_stage4 << " s\n";
    out << "  stage 5     " << r.seconds_stage5 << " s\n";
    if (r.seconds_sweep > 0) out << "  sweep       " << r.seconds_sweep << " s\n";
  }
  {
    std::ofstream out(dir + "/report.json");
    out << "{\n";
    out << "  \"config\": {\"max_total_length\": " << r.config.max_total_length
        << ", \"ordered_pairs\": " << (r.config.ordered_pairs ? "true" : "false")
        << ", \"relators_cyclically_reduced\": "
        << (r.config.relators_cyclically_reduced ? "true" : "false")
        << ", \"min_relator_length\": " << r.config.min_relator_length
        << ", \"coset_budget\": " << r.config.coset_budget
        << ", \"key_swap\": " << (r.config.key.swap_relators ? "true" : "false")
        << ", \"key_invert\": " << (r.config.key.invert_relators ? "true" : "false")
        << "},\n";
    out << "  \"counts\": {\"L1\": " << r.counts.l1 << ", \"L2\": " << r.counts.l2
        << ", \"L3\": " << r.counts.l3 << ", \"L4\": " << r.counts.l4
        << ", \"L5\": " << r.counts.l5 << ", \"nontrivial\": " << r.counts.nontrivial
        << ", \"exceeded\": " << r.counts.exceeded << "},\n";
    out << "  \"nontrivial\": [";
    for (std::size_t i = 0; i < r.nontrivial_orders.size(); ++i) {
      if (i) out << ", ";
      out << "{\"presentation\": \"" << r.nontrivial_orders[i].first
          << "\", \"order\": " << r.nontrivial_orders[i].second << "}";
    }
    out << "],\n";
    out << "  \"exceeded\": [";
    for (std::size_t i = 0; i < r.exceeded_list.size(); ++i) {
      if (i) out << ", ";
      out << "\"" << r.exceeded_list[i] << "\"";
    }
    out << "],\n";
    out << "  \"ac_status_tally\": {";
    bool first = true;
    for (auto& [k, v] : r.ac_tally) {
      if (!first) out << ", ";
      first = false;
      out << "\"" << k << "\": " << v;
    }
    out << "},\n";
    out << "  \"timings_seconds\": {\"stage123\": " << r.seconds_stage123
        << ", \"stage4\": " << r.seconds_stage4 << ", \"stage5\": "
        << r.seconds_stage5 << ", \"sweep\": " << r.seconds_sweep << "}\n";
    out << "}\n";
  }
}

// Recomputes a report purely from the record files in cfg.output_path.
inline CensusReport CensusPipeline::rebuild_report_from_records(
    const StageConfig& cfg) {
  CensusReport r;
  r.config = cfg;
  std::string line;
  for (int k = 1; k <= 5; ++k) {
    std::string path = cfg.output_path + "/L" + std::to_string(k) + ".jsonl.gz";
    if (!std::filesystem::exists(path)) {
      if (k <= 2) throw std::runtime_error("missing record file " + path);
      continue;
    }
    GzLineReader in(path);
    while (in.next_line(line)) {
      CensusRecord rec = parse_record(line);
      std::string pres = rec.relators.size() == 2
                             ? detail::presentation_line(rec.relators[0], rec.relators[1])
                             : std::string();
      switch (rec.stage_reached) {
        case 1:
          ++r.counts.died_stage2;
          break;
        case 2:
          ++r.counts.died_stage3;
          break;
        case 3:
          ++r.counts.collapsed;
          break;
        case 4:
          ++r.counts.l4;
          if (rec.order_exceeded) {
            ++r.counts.exceeded;
            r.exceeded_list.push_back(pres);
          } else {
            ++r.counts.nontrivial;
            r.nontrivial_orders.emplace_back(pres, rec.order);
          }
          break;
        case 5:
          ++r.counts.l4;
          ++r.counts.l5;
          r.ac_tally[rec.ac_status.empty() ? "open" : rec.ac_status] += 1;
          break;
      }
    }
  }
  r.counts.l3 = r.counts.collapsed + r.counts.l4;
  r.counts.l2 = r.counts.died_stage3 + r.counts.l3;
  r.counts.l1 = r.counts.died_stage2 + r.counts.l2;
  return r;
}

inline CensusReport run_pipeline(const StageConfig& cfg) {
  CensusPipeline p(cfg);
  return p.run();
}

}  // namespace accensus
