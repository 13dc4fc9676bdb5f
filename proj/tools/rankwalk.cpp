// Command-line front end: build dominance posets from historical ranking
// files, recompute average ranks from stored posets, correlate average-rank
// tables across cutoffs, and run the built-in small-n verification suite.

#include <cstdio>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rankwalk/dominance.hpp"
#include "rankwalk/errors.hpp"
#include "rankwalk/linext.hpp"
#include "rankwalk/report.hpp"
#include "rankwalk/util.hpp"
#include "rankwalk/walk.hpp"

namespace {

using namespace rankwalk;

struct BuildOptions {
  std::vector<std::string> rankings;
  std::string players;
  std::vector<int> cutoffs{10};
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  std::int64_t burn_in = -1;
  std::int64_t thin = -1;
  int chains = 1;
  double epsilon = 0.0;
  std::string out_dir = ".";
  std::int64_t extensions = -1;
  std::string initial = "prevalence_sorted";
  bool emit_cdfs = false;
  bool dump_weights = false;
  bool dump_samples = false;
};

RunManifest manifest_for_cutoff(const BuildOptions& opt, int cutoff) {
  RunManifest m;
  for (const std::string& p : opt.rankings) m.ranking_files.emplace_back(p);
  if (!opt.players.empty()) m.players_file = opt.players;
  m.cutoff = cutoff;
  m.epsilon = opt.epsilon;
  m.walk.seed = opt.seed;
  m.walk.burn_in_steps = opt.burn_in;
  m.walk.thin_steps = opt.thin;
  m.walk.num_samples = opt.samples;
  m.walk.initial_state = initial_state_from_string(opt.initial);
  m.chains = opt.chains;
  m.extensions = opt.extensions;
  m.out_dir = opt.out_dir;
  m.emit_cdfs = opt.emit_cdfs;
  m.dump_weights = opt.dump_weights;
  m.dump_samples = opt.dump_samples;
  return m;
}

void print_result(const PipelineResult& result) {
  std::cout << "cutoff=" << result.cutoff << " n=" << result.collection.n
            << " snapshots=" << result.collection.snapshots.size()
            << " cover_edges=" << result.poset.cover_edges.size()
            << " fingerprint=" << result.fingerprint << "\n";
  std::cout << "  maximal:";
  for (int i : result.poset.maximal)
    std::cout << " " << result.collection.roster[i].display_name;
  std::cout << "\n";
  std::cout << "  artifacts: " << result.poset_path.string() << " "
            << result.hasse_path.string() << " " << result.avg_ranks_path.string()
            << "\n";
}

int cmd_build_poset(const BuildOptions& opt) {
  // Each cutoff is an independent pipeline writing its own files; run them
  // concurrently.
  std::vector<int> cutoffs = opt.cutoffs;
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());

  std::vector<std::future<PipelineResult>> futures;
  futures.reserve(cutoffs.size());
  for (int cutoff : cutoffs) {
    RunManifest manifest = manifest_for_cutoff(opt, cutoff);
    futures.push_back(std::async(std::launch::async,
                                 [manifest] { return run_pipeline(manifest); }));
  }
  for (auto& f : futures) print_result(f.get());
  return 0;
}

struct AvgRanksOptions {
  std::string poset_path;
  std::int64_t extensions = 100000;
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_avg_ranks(const AvgRanksOptions& opt) {
  const PosetDocument doc = read_poset_json(opt.poset_path);
  const std::vector<LinearExtension> exts =
      sample_extensions(doc.poset, opt.extensions, opt.seed);
  const AvgRankReport report = average_ranks(exts);
  const AvgRankTable table =
      make_avg_rank_table(report, doc.roster, doc.cutoff, doc.fingerprint);
  write_avg_rank_csv(table, opt.out_path);
  std::cout << "wrote " << opt.out_path << " (" << table.rows.size() << " players, "
            << report.extensions_sampled << " extensions)\n";
  return 0;
}

struct CorrelateOptions {
  std::vector<std::string> reports;
  int top_k = 50;
  std::string out_dir = ".";
};

int cmd_correlate(const CorrelateOptions& opt) {
  std::vector<AvgRankTable> tables;
  tables.reserve(opt.reports.size());
  for (const std::string& path : opt.reports) tables.push_back(read_avg_rank_csv(path));

  const std::vector<std::string> subset = top_k_common_players(tables, opt.top_k);
  std::filesystem::create_directories(opt.out_dir);
  const auto scatter_path = std::filesystem::path(opt.out_dir) / "scatter.csv";
  const auto fit_path = std::filesystem::path(opt.out_dir) / "correlations.csv";

  if (subset.empty()) {
    std::cerr << "warning: no player appears in the top " << opt.top_k
              << " of every report; nothing to correlate\n";
    CutoffCorrelation empty;
    write_scatter_csv(empty, scatter_path);
    write_fit_csv(empty, fit_path);
    return 0;
  }

  const CutoffCorrelation corr = correlate(tables, subset);
  write_scatter_csv(corr, scatter_path);
  write_fit_csv(corr, fit_path);

  std::cout << "common players (top " << opt.top_k << " in every report): "
            << subset.size() << "\n";
  for (const CutoffPairFit& f : corr.fits) {
    std::cout << "cutoff " << f.cutoff_a << " vs " << f.cutoff_b << ": ";
    if (f.fit.defined) {
      char line[160];
      std::snprintf(line, sizeof line, "slope=%.6f intercept=%.6f r2=%.6f n=%lld",
                    f.fit.slope, f.fit.intercept, f.fit.r_squared,
                    static_cast<long long>(f.points));
      std::cout << line << "\n";
    } else {
      std::cout << "fit undefined (degenerate variance) n=" << f.points << "\n";
    }
  }
  return 0;
}

// Built-in sanity suite over the exact small-n machinery. Fast; independent
// of any external data.
int cmd_verify() {
  int failures = 0;
  const auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  // Kernel rows sum to 1 and keep at least the lazy mass on the diagonal.
  {
    bool sums_ok = true, lazy_ok = true;
    Rng rng(7);
    for (int n = 2; n <= 5; ++n) {
      WeightMatrix w;
      w.n = n;
      w.w.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) w.at(i, j) = 1.0 + 10.0 * rng.uniform();
      for (std::uint64_t s = 0; s < factorial(n); ++s) {
        const std::vector<double> row = kernel_row(w, s);
        double total = 0.0;
        for (double v : row) total += v;
        if (std::abs(total - 1.0) > 1e-12) sums_ok = false;
        if (row[s] < 0.5) lazy_ok = false;
      }
      const SupportDiagnostics diag = support_graph_check(w);
      if (!diag.strongly_connected || diag.diameter != n - 1 || !diag.has_self_loops)
        sums_ok = false;
    }
    check("kernel rows normalized, lazy, fully supported (n=2..5)", sums_ok && lazy_ok);
  }

  // Uniform weights give the uniform stationary distribution.
  {
    WeightMatrix w;
    w.n = 4;
    w.w.assign(16, 1.0);
    for (int i = 0; i < 4; ++i) w.at(i, i) = 0.0;
    const std::vector<double> mu = exact_stationary(w);
    bool ok = true;
    for (double v : mu)
      if (std::abs(v - 1.0 / 24.0) > 1e-10) ok = false;
    check("uniform weights -> uniform stationary distribution (n=4)", ok);
  }

  // Chain poset has exactly one extension; fan averages are exact.
  {
    EmpiricalRankDistribution dist;
    dist.n = 3;
    dist.sample_count = 1;
    dist.cdf = {1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0};
    const DominancePoset chain = build_poset(dist, 0.0);
    const auto exts = enumerate_extensions(chain);
    check("chain poset has a unique extension", exts.size() == 1);

    DominancePoset fan = poset_from_covers(3, {{0, 1}, {0, 2}}, 0.0, 1);
    const AvgRankReport avg = average_ranks(enumerate_extensions(fan));
    check("fan poset exact average ranks",
          std::abs(avg.avg_rank[0] - 1.0) < 1e-12 &&
              std::abs(avg.avg_rank[1] - 2.5) < 1e-12 &&
              std::abs(avg.avg_rank[2] - 2.5) < 1e-12);
  }

  // Least squares on a hand-checked instance.
  {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{2, 3, 5, 6};
    const OlsFit fit = ols_fit(x, y);
    check("least-squares fixture (slope 1.4, intercept 0.5, r2 0.98)",
          fit.defined && std::abs(fit.slope - 1.4) < 1e-12 &&
              std::abs(fit.intercept - 0.5) < 1e-12 &&
              std::abs(fit.r_squared - 0.98) < 1e-12);
  }

  if (failures > 0) throw StructuralError("verification suite failed");
  std::cout << "verify: all checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-aggregation engine: historical top-k snapshots to "
               "stochastic-dominance posets and average ranks"};
  app.require_subcommand(1);

  BuildOptions build;
  CLI::App* build_cmd = app.add_subcommand(
      "build-poset", "Run the full pipeline and write poset/Hasse/avg-rank artifacts");
  build_cmd->add_option("--rankings", build.rankings, "Ranking CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  build_cmd->add_option("--players", build.players, "Player metadata CSV for display names")
      ->check(CLI::ExistingFile);
  build_cmd->add_option("--cutoff", build.cutoffs,
                        "Top-k cutoff(s); repeat for concurrent runs")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--samples", build.samples, "Walk samples to collect")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--seed", build.seed, "Random seed");
  build_cmd->add_option("--burn-in", build.burn_in,
                        "Walk burn-in steps (-1: 50*n*(n-1))");
  build_cmd->add_option("--thin", build.thin, "Walk thinning interval (-1: 2*(n-1))");
  build_cmd->add_option("--chains", build.chains, "Independent walk chains to pool")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--epsilon", build.epsilon, "Dominance slack tolerance")
      ->check(CLI::NonNegativeNumber);
  build_cmd->add_option("--out-dir", build.out_dir, "Artifact directory");
  build_cmd->add_option("--extensions", build.extensions,
                        "Linear extensions to sample (-1: same as --samples)");
  build_cmd->add_option("--initial", build.initial, "Walk start state")
      ->check(CLI::IsMember({"prevalence_sorted", "seeded_random"}));
  build_cmd->add_flag("--emit-cdfs", build.emit_cdfs,
                      "Embed the empirical CDF matrix in the poset JSON");
  build_cmd->add_flag("--dump-weights", build.dump_weights,
                      "Also write the weight matrix as TSV");
  build_cmd->add_flag("--dump-samples", build.dump_samples,
                      "Also write the raw walk samples");

  AvgRanksOptions avg;
  CLI::App* avg_cmd = app.add_subcommand(
      "avg-ranks", "Sample linear extensions of a stored poset and write average ranks");
  avg_cmd->add_option("--poset", avg.poset_path, "Poset JSON artifact")
      ->required()
      ->check(CLI::ExistingFile);
  avg_cmd->add_option("--extensions", avg.extensions, "Extensions to sample")
      ->check(CLI::PositiveNumber);
  avg_cmd->add_option("--seed", avg.seed, "Random seed");
  avg_cmd->add_option("--avg-ranks-out,--out", avg.out_path, "Output CSV path")
      ->required();

  CorrelateOptions corr;
  CLI::App* corr_cmd = app.add_subcommand(
      "correlate", "Cross-cutoff least-squares analysis of average-rank tables");
  corr_cmd->add_option("--reports", corr.reports, "Two or more average-rank CSVs")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  corr_cmd->add_option("-k,--top", corr.top_k,
                       "Players must rank in the best k of every report")
      ->check(CLI::PositiveNumber);
  corr_cmd->add_option("--out-dir", corr.out_dir, "Directory for scatter.csv and correlations.csv");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the built-in small-roster oracle checks");

  try {
    app.parse(argc, argv);
    if (build_cmd->parsed()) return cmd_build_poset(build);
    if (avg_cmd->parsed()) return cmd_avg_ranks(avg);
    if (corr_cmd->parsed()) return cmd_correlate(corr);
    if (verify_cmd->parsed()) return cmd_verify();
    return static_cast<int>(ExitCode::usage);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::usage);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::structural);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::structural);
  }
}
