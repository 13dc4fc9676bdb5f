#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rankwalk/dominance.hpp"
#include "rankwalk/ingest.hpp"
#include "rankwalk/linext.hpp"
#include "rankwalk/walk.hpp"

namespace rankwalk {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Everything that determines a pipeline run. Two runs with equal manifests
// produce byte-identical poset/DOT/CSV artifacts; the log is exempt because
// it carries wall-clock timings.
struct RunManifest {
  std::vector<std::filesystem::path> ranking_files;
  std::filesystem::path players_file;  // empty: ids double as display names
  int cutoff = 10;
  double epsilon = 0.0;
  WalkConfig walk;
  int chains = 1;
  std::int64_t extensions = -1;  // -1: same count as walk samples
  LinextOptions linext;
  std::filesystem::path out_dir = ".";
  bool emit_cdfs = false;
  bool dump_weights = false;
  bool dump_samples = false;
};

// FNV over the raw bytes of every input file, in manifest order.
std::string input_fingerprint(const RunManifest& manifest);

// Replaces every auto (-1) sentinel with its concrete default for roster
// size n. Idempotent.
RunManifest resolve_manifest(RunManifest manifest, int n);

// Hash of the run identity: tool version, input bytes, and every parameter
// that can change an artifact. Input and output paths are deliberately
// excluded (content is hashed instead), so the same computation lands
// byte-identical in any directory. Requires a resolved manifest.
std::string manifest_fingerprint(const RunManifest& resolved, const std::string& input_fp);

struct PipelineResult {
  int cutoff = 0;
  std::string fingerprint;
  SnapshotCollection collection;
  DominancePoset poset;
  AvgRankReport avg_ranks;
  std::filesystem::path poset_path;
  std::filesystem::path hasse_path;
  std::filesystem::path avg_ranks_path;
  std::filesystem::path log_path;
};

// Full run: ingest -> weights -> walk -> dominance -> linext -> artifacts.
// Writes poset-k<K>.json, hasse-k<K>.dot, avg-ranks-k<K>.csv and run-k<K>.log
// into out_dir. Stage failures propagate with the stage name and a manifest
// echo attached.
PipelineResult run_pipeline(const RunManifest& manifest);

// One row of an average-rank table; tables are sorted best first
// (avg_rank, then external_id).
struct AvgRankRow {
  std::string external_id;
  std::string name;
  double avg_rank = 0.0;
};

struct AvgRankTable {
  int cutoff = -1;
  std::string manifest_fingerprint;
  std::int64_t extensions_sampled = 0;
  std::vector<AvgRankRow> rows;
};

AvgRankTable make_avg_rank_table(const AvgRankReport& report,
                                 std::span<const PlayerId> roster, int cutoff,
                                 const std::string& fingerprint);

void write_avg_rank_csv(const AvgRankTable& table, const std::filesystem::path& path);
AvgRankTable read_avg_rank_csv(const std::filesystem::path& path);

// Players placed in the best k of every table, matched by external id,
// returned in ascending id order. Tables whose rosters share no player at
// all raise DataError; an empty common top-k is a valid (warned) result.
std::vector<std::string> top_k_common_players(std::span<const AvgRankTable> tables, int k);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool defined = false;  // false when either variable has zero variance
};

// Simple least squares of y on x. With a degenerate (zero-variance) side the
// fit is reported undefined rather than forced to a number.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

struct CutoffPairFit {
  int cutoff_a = 0;
  int cutoff_b = 0;
  OlsFit fit;
  std::int64_t points = 0;
};

struct ScatterPoint {
  std::string external_id;
  std::string name;
  int cutoff_a = 0;
  int cutoff_b = 0;
  double rank_a = 0.0;
  double rank_b = 0.0;
};

struct CutoffCorrelation {
  std::vector<CutoffPairFit> fits;      // all unordered table pairs
  std::vector<ScatterPoint> scatter;    // one row per player per pair
};

// Pairwise fits over the given player subset, which must be present in every
// table. Subset must be nonempty.
CutoffCorrelation correlate(std::span<const AvgRankTable> tables,
                            const std::vector<std::string>& subset);

void write_scatter_csv(const CutoffCorrelation& corr, const std::filesystem::path& path);
void write_fit_csv(const CutoffCorrelation& corr, const std::filesystem::path& path);

// DOT export of the cover relation: one node per player labeled by display
// name, edges better -> worse, left-to-right rank layout, deterministic
// ordering, fingerprint embedded as a graph comment.
void export_hasse(const DominancePoset& poset, std::span<const PlayerId> roster,
                  const std::filesystem::path& path, const std::string& fingerprint);

// Poset artifact (JSON). The optional CDF matrix rides along when requested.
void write_poset_json(const DominancePoset& poset, std::span<const PlayerId> roster,
                      int cutoff, const WalkConfig& walk, int chains,
                      const std::string& fingerprint,
                      const EmpiricalRankDistribution* cdfs,
                      const std::filesystem::path& path);

struct PosetDocument {
  int cutoff = -1;
  std::string fingerprint;
  std::vector<PlayerId> roster;
  DominancePoset poset;
};

PosetDocument read_poset_json(const std::filesystem::path& path);

void dump_weight_matrix(const WeightMatrix& w, std::span<const PlayerId> roster,
                        const std::filesystem::path& path);

}  // namespace rankwalk
