// accensus: census and search tooling for balanced rank-2 presentations of
// the trivial group under the elementary transformations
//   (1) w_i <- w_i w_j   (2) w_i <- w_i^-1   (3) w_i <- f w_i f^-1
//
// Exit codes: 0 success, 1 domain-negative result (verification failed,
// word not primitive, search budget exhausted, order budget exceeded),
// 2 usage or input errors.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "accensus/abelianization.hpp"
#include "accensus/census.hpp"
#include "accensus/ga_search.hpp"
#include "accensus/presentation.hpp"
#include "accensus/sweep.hpp"
#include "accensus/todd_coxeter.hpp"
#include "accensus/whitehead.hpp"

using namespace accensus;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("AC_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
  }
  return 1;
}

int cmd_order(const std::string& line, long long max_cosets) {
  Presentation p = parse_presentation(line);
  EnumerationResult r = enumerate_cosets(p, max_cosets);
  if (r.finite()) {
    std::cout << r.order << "\n";
    return 0;
  }
  std::cout << "exceeded(" << max_cosets << ")\n";
  return 1;
}

int cmd_primitive(const std::string& text) {
  Word w = parse_word(text, 2);
  MinimizationResult m = minimize_cyclic_length(w);
  bool prim = m.minimal.length() == 1;
  std::cout << (prim ? "primitive" : "not-primitive") << "\n";
  for (const WhiteheadAut& a : m.applied) std::cout << "  " << a.name() << "\n";
  if (!m.applied.empty())
    std::cout << "  minimal cyclic form: " << to_string(m.minimal) << "\n";
  return prim ? 0 : 1;
}

int cmd_abel(const std::string& line) {
  Presentation p = parse_presentation(line);
  auto factors = invariant_factors(p);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) std::cout << ' ';
    std::cout << factors[i];
  }
  std::cout << "\n";
  return 0;
}

int cmd_verify(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open certificate file: " << path << "\n";
    return 2;
  }
  Certificate c = parse_certificate(in);
  bool ok = verify_certificate(c);
  std::cout << (ok ? "valid" : "invalid") << "\n";
  return ok ? 0 : 1;
}

int cmd_search(const std::string& line, const std::string& mode_name,
               const std::string& target_line, std::uint64_t seed,
               double budget, long long max_generations, int islands,
               int assist_cap, const std::string& cert_path) {
  Presentation p = parse_presentation(line);
  SearchMode mode = SearchMode::trivialize();
  if (mode_name == "equiv") {
    if (target_line.empty()) {
      std::cerr << "--mode equiv requires --target\n";
      return 2;
    }
    mode = SearchMode::equivalence(parse_presentation(target_line));
  } else if (mode_name != "trivialize") {
    std::cerr << "unknown mode: " << mode_name << "\n";
    return 2;
  }
  GAConfig cfg;
  cfg.rng_seed = seed;
  cfg.wall_clock_budget = budget;
  cfg.max_generations = max_generations;
  cfg.islands = islands;
  std::optional<StandardClosure> table;
  if (assist_cap > 0) {
    table.emplace(assist_cap, 1, 60000000);
    std::cout << "reachability table: " << table->size() << " tuples (cap "
              << assist_cap << ")\n";
  }
  SearchOutcome out = evolve(p, mode, cfg, table ? &*table : nullptr);
  if (!out.success()) {
    std::cout << "budget-exhausted after " << out.generations_used
              << " generations (best fitness "
              << (out.best_fitness_trace.empty() ? -1 : out.best_fitness_trace.back())
              << ")\n";
    return 1;
  }
  std::cout << "success in " << out.generations_used << " generations, "
            << out.certificate->moves.size() << " moves\n";
  std::cout << "target: " << to_string(out.certificate->claimed_target) << "\n";
  if (!cert_path.empty()) {
    std::ofstream cf(cert_path);
    cf << to_string(*out.certificate);
    std::cout << "certificate written to " << cert_path << "\n";
  }
  return 0;
}

int cmd_census(StageConfig cfg, int stage, const std::string& fixtures,
               double ga_budget, std::uint64_t seed) {
  cfg.through_stage = std::min(stage, 5);
  CensusReport rep = run_pipeline(cfg);
  SweepStats sweep{};
  if (stage >= 6) {
    SweepConfig sc;
    sc.ga.rng_seed = seed;
    sc.easy_budget_seconds = ga_budget;
    sc.equiv_budget_seconds = ga_budget;
    sc.fixtures_dir = fixtures;
    sweep = sweep_l5(cfg.output_path, sc);
  }
  std::ifstream report(cfg.output_path + "/report.txt");
  std::cout << report.rdbuf();
  if (stage >= 6) {
    std::cout << "sweep: standard " << sweep.standard << ", reduced-to-(5) "
              << sweep.reduced_to_5 << ", reduced-to-corollary1 "
              << sweep.reduced_to_corollary1 << ", open " << sweep.open
              << " (cached " << sweep.cached << ")\n";
    return sweep.open == 0 ? 0 : 1;
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  StageConfig cfg;
  cfg.output_path = dir;
  // convention echo comes from the persisted report when available
  try {
    std::ifstream jin(dir + "/report.json");
    if (jin) {
      nlohmann::json j = nlohmann::json::parse(jin);
      cfg.max_total_length = j["config"]["max_total_length"].get<int>();
      cfg.ordered_pairs = j["config"]["ordered_pairs"].get<bool>();
      cfg.relators_cyclically_reduced =
          j["config"]["relators_cyclically_reduced"].get<bool>();
      cfg.min_relator_length = j["config"]["min_relator_length"].get<int>();
      cfg.coset_budget = j["config"]["coset_budget"].get<long long>();
      cfg.key.swap_relators = j["config"]["key_swap"].get<bool>();
      cfg.key.invert_relators = j["config"]["key_invert"].get<bool>();
    }
  } catch (const std::exception&) {
  }
  CensusReport rep = CensusPipeline::rebuild_report_from_records(cfg);
  CensusPipeline::write_report_files(rep, dir);
  std::ifstream report(dir + "/report.txt");
  std::cout << report.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"census and AC-move search for balanced rank-2 presentations"};
  app.require_subcommand(1);

  // census
  auto* census = app.add_subcommand("census", "run the staged census pipeline");
  StageConfig ccfg;
  int stage = 5;
  std::string fixtures;
  double ga_budget = 60.0;
  census->add_option("--max-total", ccfg.max_total_length,
                     "maximum total relator length")
      ->default_val(12);
  census->add_option("--out", ccfg.output_path, "output directory")->required();
  census->add_option("--shards", ccfg.shard_count,
                     "shard count (0 = hardware threads)");
  census->add_option("--stage", stage, "run through stage k (3..6)")
      ->check(CLI::Range(3, 6));
  census->add_option("--coset-budget", ccfg.coset_budget, "Todd-Coxeter budget");
  census->add_option("--min-relator-length", ccfg.min_relator_length,
                     "minimum relator length");
  census->add_flag("!--unordered-pairs", ccfg.ordered_pairs,
                   "count unordered relator pairs");
  census->add_flag("--cyclically-reduced", ccfg.relators_cyclically_reduced,
                   "restrict generation to cyclically reduced relators");
  census->add_flag("--key-invert", ccfg.key.invert_relators,
                   "fold relator inversion into the dedup key");
  census->add_flag("!--no-key-swap", ccfg.key.swap_relators,
                   "drop relator swap from the dedup key");
  census->add_option("--gzip-level", ccfg.gzip_level, "record compression level");
  census->add_option("--fixtures", fixtures,
                     "certificate fixture directory for the sweep");
  census->add_option("--ga-budget", ga_budget,
                     "per-presentation sweep budget in seconds");

  // order
  auto* order = app.add_subcommand("order", "group order via coset enumeration");
  std::string order_line;
  long long max_cosets = 50000;
  order->add_option("presentation", order_line, "presentation line")->required();
  order->add_option("--max-cosets", max_cosets, "coset budget");

  // primitive
  auto* prim = app.add_subcommand("primitive", "primitivity of a rank-2 word");
  std::string prim_word;
  prim->add_option("word", prim_word, "word over x, y, X, Y")->required();

  // abel
  auto* abel = app.add_subcommand("abel", "abelianization invariant factors");
  std::string abel_line;
  abel->add_option("presentation", abel_line, "presentation line")->required();

  // search
  auto* search = app.add_subcommand("search", "genetic search for a move sequence");
  std::string search_line, search_mode = "trivialize", search_target, cert_path;
  std::uint64_t seed = default_seed();
  double budget = 30.0;
  long long max_generations = 1000000;
  int islands = 1;
  int assist_cap = 0;
  search->add_option("presentation", search_line, "presentation line")->required();
  search->add_option("--mode", search_mode, "trivialize | equiv");
  search->add_option("--target", search_target, "target presentation (equiv mode)");
  search->add_option("--seed", seed, "random seed (AC_SEED env overrides default)");
  search->add_option("--budget", budget, "wall-clock budget in seconds (0 = off)");
  search->add_option("--max-generations", max_generations, "generation cap");
  search->add_option("--islands", islands, "independent islands");
  search->add_option("--assist-cap", assist_cap,
                     "precompute the reachability table up to this relator "
                     "length (0 = off)");
  search->add_option("--cert", cert_path, "write the certificate here");

  // verify
  auto* verify = app.add_subcommand("verify", "replay a move certificate");
  std::string cert_file;
  verify->add_option("certificate", cert_file, "certificate file")->required();

  // report
  auto* report = app.add_subcommand("report", "regenerate a census report");
  std::string report_dir;
  report->add_option("dir", report_dir, "census output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*census) return cmd_census(ccfg, stage, fixtures, ga_budget, default_seed());
    if (*order) return cmd_order(order_line, max_cosets);
    if (*prim) return cmd_primitive(prim_word);
    if (*abel) return cmd_abel(abel_line);
    if (*search)
      return cmd_search(search_line, search_mode, search_target, seed, budget,
                        max_generations, islands, assist_cap, cert_path);
    if (*verify) return cmd_verify(cert_file);
    if (*report) return cmd_report(report_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
