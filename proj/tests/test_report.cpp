#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "rankwalk/errors.hpp"
#include "rankwalk/report.hpp"
#include "test_support.hpp"

using namespace rankwalk;
using testsupport::TempDir;

namespace {

AvgRankTable table_of(int cutoff, const std::vector<std::pair<std::string, double>>& rows) {
  AvgRankTable table;
  table.cutoff = cutoff;
  table.manifest_fingerprint = "0123456789abcdef";
  table.extensions_sampled = 1000;
  for (const auto& [id, avg] : rows) table.rows.push_back({id, "Player " + id, avg});
  return table;
}

RunManifest fixture_manifest(const std::filesystem::path& out_dir) {
  RunManifest m;
  m.ranking_files = {testsupport::data_dir() / "synthetic5.csv"};
  m.players_file = testsupport::data_dir() / "synthetic5_players.csv";
  m.cutoff = 3;
  m.epsilon = 0.0;
  m.walk.seed = 1;
  m.walk.num_samples = 20000;
  m.extensions = 20000;
  m.out_dir = out_dir;
  return m;
}

}  // namespace

TEST_CASE("least squares on a fixed four-point data set") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{2.0, 3.0, 5.0, 6.0};
  const OlsFit fit = ols_fit(x, y);
  REQUIRE(fit.defined);
  CHECK(std::fabs(fit.slope - 1.4) < 1e-9);
  CHECK(std::fabs(fit.intercept - 0.5) < 1e-9);
  CHECK(std::fabs(fit.r_squared - 0.98) < 1e-9);
}

TEST_CASE("a perfectly linear relation explains all variance") {
  const std::vector<double> x{-2.0, 0.5, 1.0, 7.0, 11.0};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * v + 1.0);
  const OlsFit fit = ols_fit(x, y);
  REQUIRE(fit.defined);
  CHECK(std::fabs(fit.slope - 2.0) < 1e-12);
  CHECK(std::fabs(fit.intercept - 1.0) < 1e-12);
  CHECK(std::fabs(fit.r_squared - 1.0) < 1e-12);
}

TEST_CASE("degenerate regressions are flagged, not forced") {
  const std::vector<double> constant{3.0, 3.0, 3.0};
  const std::vector<double> varying{1.0, 2.0, 3.0};
  CHECK_FALSE(ols_fit(constant, varying).defined);
  CHECK_FALSE(ols_fit(varying, constant).defined);
  CHECK_FALSE(ols_fit(constant, constant).defined);
  const std::vector<double> one{1.0};
  CHECK_FALSE(ols_fit(one, one).defined);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(ols_fit(two, one), StructuralError);
}

TEST_CASE("common top-k players across tables") {
  const AvgRankTable a = table_of(10, {{"p1", 1.0}, {"p2", 2.0}, {"p3", 3.0}, {"p4", 4.0}});
  const AvgRankTable b = table_of(20, {{"p2", 1.0}, {"p1", 2.0}, {"p4", 3.0}, {"p3", 4.0}});

  SUBCASE("intersection respects each table's own order") {
    const std::vector<AvgRankTable> tables{a, b};
    CHECK(top_k_common_players(tables, 2) == std::vector<std::string>{"p1", "p2"});
    // Top 3 of a = {p1,p2,p3}; of b = {p2,p1,p4}; intersection ascending.
    CHECK(top_k_common_players(tables, 3) == std::vector<std::string>{"p1", "p2"});
    CHECK(top_k_common_players(tables, 4) ==
          std::vector<std::string>{"p1", "p2", "p3", "p4"});
  }
  SUBCASE("an empty common top-k is a legitimate answer") {
    const AvgRankTable c =
        table_of(30, {{"p9", 1.0}, {"p8", 2.0}, {"p1", 3.0}, {"p2", 4.0}});
    const std::vector<AvgRankTable> tables{a, c};
    CHECK(top_k_common_players(tables, 2).empty());
  }
  SUBCASE("tables with disjoint rosters are rejected") {
    const AvgRankTable d = table_of(40, {{"q1", 1.0}, {"q2", 2.0}});
    const std::vector<AvgRankTable> tables{a, d};
    CHECK_THROWS_AS(top_k_common_players(tables, 2), DataError);
  }
  SUBCASE("contract checks") {
    const std::vector<AvgRankTable> one{a};
    CHECK_THROWS_AS(top_k_common_players(one, 2), StructuralError);
    const std::vector<AvgRankTable> both{a, b};
    CHECK_THROWS_AS(top_k_common_players(both, 0), StructuralError);
  }
}

TEST_CASE("pairwise fits reuse the shared least-squares core") {
  const AvgRankTable a = table_of(10, {{"p1", 1.0}, {"p2", 2.0}, {"p3", 3.0}, {"p4", 4.0}});
  const AvgRankTable b = table_of(20, {{"p1", 2.0}, {"p2", 3.0}, {"p3", 5.0}, {"p4", 6.0}});
  const std::vector<AvgRankTable> tables{a, b};
  const CutoffCorrelation corr = correlate(tables, {"p1", "p2", "p3", "p4"});
  REQUIRE(corr.fits.size() == 1);
  const CutoffPairFit& pair = corr.fits.front();
  CHECK(pair.cutoff_a == 10);
  CHECK(pair.cutoff_b == 20);
  CHECK(pair.points == 4);
  REQUIRE(pair.fit.defined);
  CHECK(std::fabs(pair.fit.slope - 1.4) < 1e-9);
  CHECK(std::fabs(pair.fit.r_squared - 0.98) < 1e-9);
  REQUIRE(corr.scatter.size() == 4);
  CHECK(corr.scatter.front().external_id == "p1");  // subset is sorted
  CHECK(corr.scatter.front().rank_a == 1.0);
  CHECK(corr.scatter.front().rank_b == 2.0);

  CHECK_THROWS_AS(correlate(tables, {}), StructuralError);
  CHECK_THROWS_AS(correlate(tables, {"p9"}), DataError);
}

TEST_CASE("fit and scatter artifacts") {
  TempDir dir("fits");
  const AvgRankTable a = table_of(10, {{"p1", 1.0}, {"p2", 2.0}, {"p3", 3.0}});
  const AvgRankTable b = table_of(20, {{"p1", 2.0}, {"p2", 2.0}, {"p3", 2.0}});
  const std::vector<AvgRankTable> tables{a, b};
  const CutoffCorrelation corr = correlate(tables, {"p1", "p2", "p3"});

  write_fit_csv(corr, dir.file("fits.csv"));
  const std::string fits = testsupport::read_file(dir.file("fits.csv"));
  CHECK(fits.find("cutoff_a,cutoff_b,points,slope,intercept,r_squared,defined") !=
        std::string::npos);
  CHECK(fits.find("10,20,3,,,,false") != std::string::npos);  // zero y-variance

  write_scatter_csv(corr, dir.file("scatter.csv"));
  const std::string scatter = testsupport::read_file(dir.file("scatter.csv"));
  CHECK(scatter.find("p1,Player p1,10,20,1,2") != std::string::npos);
}

TEST_CASE("average-rank tables sort best-first and round-trip through CSV") {
  AvgRankReport report;
  report.avg_rank = {2.75, 1.0000000000000002, 3.25};
  report.extensions_sampled = 4321;
  const std::vector<PlayerId> roster{{"a9", "Ann Alder"}, {"b7", "Bo Birch"},
                                     {"c5", "Cy Cedar"}};
  const AvgRankTable table = make_avg_rank_table(report, roster, 25, "feedfacefeedface");
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].external_id == "b7");  // best average first
  CHECK(table.rows[1].external_id == "a9");
  CHECK(table.rows[2].external_id == "c5");

  TempDir dir("avgcsv");
  write_avg_rank_csv(table, dir.file("avg.csv"));
  const AvgRankTable loaded = read_avg_rank_csv(dir.file("avg.csv"));
  CHECK(loaded.cutoff == 25);
  CHECK(loaded.manifest_fingerprint == "feedfacefeedface");
  CHECK(loaded.extensions_sampled == 4321);
  REQUIRE(loaded.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded.rows[i].external_id == table.rows[i].external_id);
    CHECK(loaded.rows[i].name == table.rows[i].name);
    // %.17g makes the decimal text exact for doubles.
    CHECK(loaded.rows[i].avg_rank == table.rows[i].avg_rank);
  }
  CHECK_THROWS_AS(read_avg_rank_csv(dir.file("missing.csv")), DataError);
}

TEST_CASE("ties in the average break by external id") {
  AvgRankReport report;
  report.avg_rank = {2.0, 2.0};
  report.extensions_sampled = 10;
  const std::vector<PlayerId> roster{{"z1", "Z"}, {"a1", "A"}};
  const AvgRankTable table = make_avg_rank_table(report, roster, 5, "fp");
  CHECK(table.rows[0].external_id == "a1");
  CHECK(table.rows[1].external_id == "z1");
}

TEST_CASE("cover-relation DOT export") {
  TempDir dir("dot");
  const DominancePoset poset = poset_from_covers(3, {{0, 1}, {1, 2}}, 0.0, 9);
  const std::vector<PlayerId> roster{{"p1", "Amy \"Ace\" Alder"}, {"p2", "Bo Birch"},
                                     {"p3", "Cy Cedar"}};
  export_hasse(poset, roster, dir.file("h.dot"), "deadbeefdeadbeef");
  const std::string dot = testsupport::read_file(dir.file("h.dot"));
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("rankdir=\"LR\"") != std::string::npos);
  CHECK(dot.find("manifest_fingerprint=deadbeefdeadbeef") != std::string::npos);
  CHECK(dot.find("p0 -> p1;") != std::string::npos);
  CHECK(dot.find("p1 -> p2;") != std::string::npos);
  CHECK(dot.find("\"Amy \\\"Ace\\\" Alder\"") != std::string::npos);  // quotes escaped

  export_hasse(poset, roster, dir.file("h2.dot"), "deadbeefdeadbeef");
  CHECK(testsupport::read_file(dir.file("h2.dot")) == dot);  // byte-stable

  const DominancePoset flat = poset_from_covers(2, {}, 0.0, 9);
  const std::vector<PlayerId> two{{"p1", "A"}, {"p2", "B"}};
  export_hasse(flat, two, dir.file("flat.dot"), "fp");
  CHECK(testsupport::read_file(dir.file("flat.dot")).find("->") == std::string::npos);

  CHECK_THROWS_AS(export_hasse(poset, two, dir.file("bad.dot"), "fp"), StructuralError);
}

TEST_CASE("poset JSON artifacts round-trip") {
  TempDir dir("poset");
  const DominancePoset poset = poset_from_covers(4, {{0, 1}, {1, 2}, {1, 3}}, 0.05, 777);
  const std::vector<PlayerId> roster{
      {"101", "Ann"}, {"102", "Bo"}, {"103", "Cy"}, {"104", "Dee"}};
  WalkConfig walk;
  walk.seed = 42;
  walk.burn_in_steps = 600;
  walk.thin_steps = 6;
  walk.num_samples = 777;

  write_poset_json(poset, roster, 7, walk, 2, "cafef00dcafef00d", nullptr,
                   dir.file("poset.json"));
  const PosetDocument doc = read_poset_json(dir.file("poset.json"));
  CHECK(doc.cutoff == 7);
  CHECK(doc.fingerprint == "cafef00dcafef00d");
  REQUIRE(doc.roster.size() == 4);
  CHECK(doc.roster[2].external_id == "103");
  CHECK(doc.roster[2].display_name == "Cy");
  CHECK(doc.poset.relation == poset.relation);
  CHECK(doc.poset.cover_edges == poset.cover_edges);
  CHECK(doc.poset.maximal == poset.maximal);
  CHECK(doc.poset.epsilon == 0.05);
  CHECK(doc.poset.sample_count == 777);

  SUBCASE("optional CDF matrix rides along") {
    EmpiricalRankDistribution cdfs;
    cdfs.n = 4;
    cdfs.sample_count = 777;
    cdfs.cdf = {0.7, 0.9, 1.0, 1.0, 0.2, 0.5, 0.8, 1.0,
                0.05, 0.3, 0.7, 1.0, 0.05, 0.3, 0.5, 1.0};
    write_poset_json(poset, roster, 7, walk, 2, "cafef00dcafef00d", &cdfs,
                     dir.file("poset-cdf.json"));
    const std::string text = testsupport::read_file(dir.file("poset-cdf.json"));
    CHECK(text.find("\"cdf\"") != std::string::npos);
    const PosetDocument again = read_poset_json(dir.file("poset-cdf.json"));
    CHECK(again.poset.relation == poset.relation);
  }
  SUBCASE("garbage and missing files are data errors") {
    testsupport::write_file(dir.file("junk.json"), "{ not json");
    CHECK_THROWS_AS(read_poset_json(dir.file("junk.json")), DataError);
    testsupport::write_file(dir.file("wrong.json"), "{\"schema\": \"other/1\"}");
    CHECK_THROWS_AS(read_poset_json(dir.file("wrong.json")), DataError);
    CHECK_THROWS_AS(read_poset_json(dir.file("absent.json")), DataError);
  }
}

TEST_CASE("manifest resolution fills every auto field and is idempotent") {
  RunManifest m;
  m.walk.num_samples = 5000;
  const RunManifest once = resolve_manifest(m, 5);
  CHECK(once.walk.burn_in_steps == 1000);  // 50 * 5 * 4
  CHECK(once.walk.thin_steps == 8);        // 2 * 4
  CHECK(once.extensions == 5000);          // follows the walk sample count
  CHECK(once.linext.burn_in_steps == 250); // 125 * ceil(ln 5)
  CHECK(once.linext.thin_steps == 25);
  const RunManifest twice = resolve_manifest(once, 5);
  CHECK(twice.walk.burn_in_steps == once.walk.burn_in_steps);
  CHECK(twice.walk.thin_steps == once.walk.thin_steps);
  CHECK(twice.extensions == once.extensions);
  CHECK(twice.linext.burn_in_steps == once.linext.burn_in_steps);
  CHECK(twice.linext.thin_steps == once.linext.thin_steps);
}

TEST_CASE("input fingerprints depend on bytes, order, and the player file") {
  TempDir dir("fprint");
  testsupport::write_file(dir.file("a.csv"), "alpha\n");
  testsupport::write_file(dir.file("b.csv"), "beta\n");
  testsupport::write_file(dir.file("names.csv"), "1,Ann,Alder\n");

  RunManifest ab;
  ab.ranking_files = {dir.file("a.csv"), dir.file("b.csv")};
  RunManifest ba;
  ba.ranking_files = {dir.file("b.csv"), dir.file("a.csv")};
  RunManifest ab_names = ab;
  ab_names.players_file = dir.file("names.csv");

  const std::string fp_ab = input_fingerprint(ab);
  CHECK(fp_ab.size() == 16);
  CHECK(fp_ab != input_fingerprint(ba));
  CHECK(fp_ab != input_fingerprint(ab_names));
  CHECK(fp_ab == input_fingerprint(ab));  // pure function of the bytes

  RunManifest missing;
  missing.ranking_files = {dir.file("nope.csv")};
  CHECK_THROWS_AS(input_fingerprint(missing), DataError);
}

TEST_CASE("run fingerprints track parameters but never paths") {
  RunManifest base = resolve_manifest(fixture_manifest("outdir-a"), 5);
  const std::string input_fp = "0011223344556677";
  const std::string fp = manifest_fingerprint(base, input_fp);
  CHECK(fp.size() == 16);

  RunManifest moved = base;
  moved.out_dir = "completely/other/dir";
  moved.ranking_files = {"renamed.csv"};  // content hash is what matters
  CHECK(manifest_fingerprint(moved, input_fp) == fp);

  RunManifest other = base;
  other.epsilon = 0.25;
  CHECK(manifest_fingerprint(other, input_fp) != fp);
  other = base;
  other.cutoff = 9;
  CHECK(manifest_fingerprint(other, input_fp) != fp);
  other = base;
  other.walk.seed = 77;
  CHECK(manifest_fingerprint(other, input_fp) != fp);
  other = base;
  other.chains = 3;
  CHECK(manifest_fingerprint(other, input_fp) != fp);
  CHECK(manifest_fingerprint(base, "7766554433221100") != fp);
}

TEST_CASE("the full pipeline emits matching artifacts on the bundled data") {
  TempDir dir("pipeline");
  RunManifest manifest = fixture_manifest(dir.path());
  manifest.dump_weights = true;
  manifest.dump_samples = true;
  manifest.emit_cdfs = true;
  const PipelineResult result = run_pipeline(manifest);

  CHECK(result.cutoff == 3);
  CHECK(result.collection.n == 5);
  audit_poset(result.poset);

  REQUIRE(std::filesystem::exists(result.poset_path));
  REQUIRE(std::filesystem::exists(result.hasse_path));
  REQUIRE(std::filesystem::exists(result.avg_ranks_path));
  REQUIRE(std::filesystem::exists(result.log_path));
  CHECK(std::filesystem::exists(dir.file("weights-k3.tsv")));
  CHECK(std::filesystem::exists(dir.file("samples-k3.txt")));

  const PosetDocument doc = read_poset_json(result.poset_path);
  CHECK(doc.cutoff == 3);
  CHECK(doc.fingerprint == result.fingerprint);
  CHECK(doc.roster.size() == 5);
  CHECK(doc.poset.relation == result.poset.relation);

  const AvgRankTable table = read_avg_rank_csv(result.avg_ranks_path);
  CHECK(table.cutoff == 3);
  CHECK(table.manifest_fingerprint == result.fingerprint);
  CHECK(table.rows.size() == 5);
  CHECK(table.extensions_sampled == 20000);

  // The log names every stage and carries timing; the sample dump reloads.
  const std::string log = testsupport::read_file(result.log_path);
  for (const char* stage : {"stage=ingest", "stage=weights", "stage=walk",
                            "stage=dominance", "stage=linext", "stage=artifacts"})
    CHECK(log.find(stage) != std::string::npos);
  CHECK(log.find("elapsed_ms=") != std::string::npos);
  const SampleSet reloaded = load_samples(dir.file("samples-k3.txt"));
  CHECK(reloaded.samples.size() == 20000);
  CHECK(reloaded.n == 5);

  // The best average rank belongs to the lone maximal player.
  REQUIRE(result.poset.maximal.size() == 1);
  const int top = result.poset.maximal.front();
  CHECK(table.rows.front().external_id ==
        result.collection.roster[top].external_id);
}

TEST_CASE("identical manifests produce byte-identical artifacts anywhere") {
  TempDir dir_a("bytes-a");
  TempDir dir_b("bytes-b");
  RunManifest a = fixture_manifest(dir_a.path());
  a.walk.num_samples = 1500;
  a.extensions = 1500;
  RunManifest b = a;
  b.out_dir = dir_b.path();

  const PipelineResult ra = run_pipeline(a);
  const PipelineResult rb = run_pipeline(b);
  CHECK(ra.fingerprint == rb.fingerprint);
  CHECK(testsupport::read_file(ra.poset_path) == testsupport::read_file(rb.poset_path));
  CHECK(testsupport::read_file(ra.hasse_path) == testsupport::read_file(rb.hasse_path));
  CHECK(testsupport::read_file(ra.avg_ranks_path) ==
        testsupport::read_file(rb.avg_ranks_path));
  // run-*.log is exempt: it records wall-clock timings.
}

TEST_CASE("pipeline failures name the stage and echo the manifest") {
  TempDir dir("stageerr");
  testsupport::write_file(dir.file("bad.csv"),
                          "date,rank,player\nnotadate,1,p1\n");
  RunManifest manifest;
  manifest.ranking_files = {dir.file("bad.csv")};
  manifest.out_dir = dir.path();
  CHECK_THROWS_WITH_AS(run_pipeline(manifest), doctest::Contains("stage=ingest"),
                       DataError);

  RunManifest empty;
  empty.out_dir = dir.path();
  CHECK_THROWS_WITH_AS(run_pipeline(empty), doctest::Contains("no ranking files"),
                       DataError);
}
