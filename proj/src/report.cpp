#include "rankwalk/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rankwalk/errors.hpp"
#include "rankwalk/util.hpp"

namespace rankwalk {

namespace {

using ordered_json = nlohmann::ordered_json;

// Fixed decimal formatting for CSV artifacts: round-trippable and identical
// across runs.
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string manifest_echo(const RunManifest& m) {
  std::ostringstream os;
  os << "cutoff=" << m.cutoff << " seed=" << m.walk.seed << " files=";
  for (std::size_t i = 0; i < m.ranking_files.size(); ++i)
    os << (i ? ";" : "") << m.ranking_files[i].string();
  return os.str();
}

// Runs one pipeline stage, attaching the stage name and the manifest echo to
// anything thrown, without changing the error's category.
template <typename F>
auto run_stage(const char* name, const RunManifest& m, F&& fn) {
  const auto annotate = [&](const char* what) {
    return std::string(what) + " [stage=" + name + " " + manifest_echo(m) + "]";
  };
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(annotate(e.what()));
  } catch (const StructuralError& e) {
    throw StructuralError(annotate(e.what()));
  } catch (const std::exception& e) {
    throw StructuralError(annotate(e.what()));
  }
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - since)
      .count();
}

std::string sanitize_csv_field(std::string s) {
  // The artifact format is plain comma-separated text without quoting.
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string escape_dot(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == '"') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string input_fingerprint(const RunManifest& manifest) {
  std::uint64_t h = kFnvOffset;
  for (const auto& path : manifest.ranking_files) {
    h = fnv1a64("ranking-file", h);
    h = fnv1a64(read_file_bytes(path), h);
  }
  if (!manifest.players_file.empty()) {
    h = fnv1a64("players-file", h);
    h = fnv1a64(read_file_bytes(manifest.players_file), h);
  }
  return to_hex16(h);
}

RunManifest resolve_manifest(RunManifest manifest, int n) {
  if (manifest.walk.burn_in_steps < 0) manifest.walk.burn_in_steps = default_burn_in(n);
  if (manifest.walk.thin_steps < 0) manifest.walk.thin_steps = default_thinning(n);
  if (manifest.extensions < 0) manifest.extensions = manifest.walk.num_samples;
  if (manifest.linext.burn_in_steps < 0)
    manifest.linext.burn_in_steps = default_linext_burn_in(n);
  if (manifest.linext.thin_steps < 0)
    manifest.linext.thin_steps = default_linext_thinning(n);
  return manifest;
}

std::string manifest_fingerprint(const RunManifest& resolved, const std::string& input_fp) {
  std::ostringstream canon;
  canon << "tool=" << kToolVersion << "\n"
        << "rng=" << kRngAlgorithm << "\n"
        << "input=" << input_fp << "\n"
        << "cutoff=" << resolved.cutoff << "\n"
        << "epsilon=" << format_double(resolved.epsilon) << "\n"
        << "seed=" << resolved.walk.seed << "\n"
        << "burn_in=" << resolved.walk.burn_in_steps << "\n"
        << "thin=" << resolved.walk.thin_steps << "\n"
        << "samples=" << resolved.walk.num_samples << "\n"
        << "initial=" << to_string(resolved.walk.initial_state) << "\n"
        << "chains=" << resolved.chains << "\n"
        << "extensions=" << resolved.extensions << "\n"
        << "linext_burn_in=" << resolved.linext.burn_in_steps << "\n"
        << "linext_thin=" << resolved.linext.thin_steps << "\n"
        << "emit_cdfs=" << (resolved.emit_cdfs ? 1 : 0) << "\n";
  return to_hex16(fnv1a64(canon.str()));
}

AvgRankTable make_avg_rank_table(const AvgRankReport& report,
                                 std::span<const PlayerId> roster, int cutoff,
                                 const std::string& fingerprint) {
  if (report.avg_rank.size() != roster.size())
    throw StructuralError("average-rank report does not match the roster");
  AvgRankTable table;
  table.cutoff = cutoff;
  table.manifest_fingerprint = fingerprint;
  table.extensions_sampled = report.extensions_sampled;
  table.rows.reserve(roster.size());
  for (std::size_t i = 0; i < roster.size(); ++i)
    table.rows.push_back({roster[i].external_id, roster[i].display_name,
                          report.avg_rank[i]});
  std::sort(table.rows.begin(), table.rows.end(),
            [](const AvgRankRow& a, const AvgRankRow& b) {
              if (a.avg_rank != b.avg_rank) return a.avg_rank < b.avg_rank;
              return a.external_id < b.external_id;
            });
  return table;
}

void write_avg_rank_csv(const AvgRankTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# manifest_fingerprint=" << table.manifest_fingerprint << "\n";
  out << "# cutoff=" << table.cutoff << "\n";
  out << "external_id,name,avg_rank,extensions_sampled\n";
  for (const AvgRankRow& row : table.rows) {
    out << sanitize_csv_field(row.external_id) << "," << sanitize_csv_field(row.name)
        << "," << format_double(row.avg_rank) << "," << table.extensions_sampled << "\n";
  }
  write_text_file(path, out.str());
}

AvgRankTable read_avg_rank_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open average-rank file " + path.string());
  AvgRankTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    if (stripped.front() == '#') {
      const std::string_view body = trim(stripped.substr(1));
      if (body.starts_with("manifest_fingerprint="))
        table.manifest_fingerprint = std::string(body.substr(21));
      else if (body.starts_with("cutoff="))
        table.cutoff = std::stoi(std::string(body.substr(7)));
      continue;
    }
    if (!header_seen) {  // column header line
      header_seen = true;
      continue;
    }
    const auto fields = split(stripped, ',');
    if (fields.size() != 4)
      throw DataError("expected 4 fields at " + path.string() + ":" +
                      std::to_string(line_no));
    AvgRankRow row;
    row.external_id = std::string(trim(fields[0]));
    row.name = std::string(trim(fields[1]));
    try {
      row.avg_rank = std::stod(std::string(fields[2]));
      table.extensions_sampled = std::stoll(std::string(fields[3]));
    } catch (const std::exception&) {
      throw DataError("unparseable numeric field at " + path.string() + ":" +
                      std::to_string(line_no));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty())
    throw DataError("no rows in average-rank file " + path.string());
  return table;
}

std::vector<std::string> top_k_common_players(std::span<const AvgRankTable> tables, int k) {
  if (tables.size() < 2)
    throw StructuralError("common-player analysis needs at least two tables");
  if (k < 1) throw StructuralError("k must be positive");

  // The whole-roster intersection distinguishes "different data" (an error)
  // from "no shared top-k" (a legitimate empty answer).
  std::set<std::string> roster_common;
  for (const AvgRankRow& row : tables.front().rows) roster_common.insert(row.external_id);
  for (std::size_t t = 1; t < tables.size(); ++t) {
    std::set<std::string> ids;
    for (const AvgRankRow& row : tables[t].rows) ids.insert(row.external_id);
    std::set<std::string> both;
    std::ranges::set_intersection(roster_common, ids, std::inserter(both, both.begin()));
    roster_common = std::move(both);
  }
  if (roster_common.empty())
    throw DataError("the average-rank tables share no players at all");

  std::set<std::string> common;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::vector<AvgRankRow> rows = tables[t].rows;
    std::sort(rows.begin(), rows.end(), [](const AvgRankRow& a, const AvgRankRow& b) {
      if (a.avg_rank != b.avg_rank) return a.avg_rank < b.avg_rank;
      return a.external_id < b.external_id;
    });
    std::set<std::string> top;
    for (std::size_t i = 0; i < rows.size() && i < static_cast<std::size_t>(k); ++i)
      top.insert(rows[i].external_id);
    if (t == 0) {
      common = std::move(top);
    } else {
      std::set<std::string> both;
      std::ranges::set_intersection(common, top, std::inserter(both, both.begin()));
      common = std::move(both);
    }
  }
  return {common.begin(), common.end()};
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StructuralError("ols_fit: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return {};  // undefined

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return {};  // degenerate variance
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.r_squared = (sxy * sxy) / (sxx * syy);
  fit.defined = true;
  return fit;
}

CutoffCorrelation correlate(std::span<const AvgRankTable> tables,
                            const std::vector<std::string>& subset) {
  if (tables.size() < 2) throw StructuralError("correlate needs at least two tables");
  if (subset.empty()) throw StructuralError("correlate needs a nonempty player subset");

  std::vector<std::map<std::string, const AvgRankRow*>> by_id(tables.size());
  for (std::size_t t = 0; t < tables.size(); ++t)
    for (const AvgRankRow& row : tables[t].rows) by_id[t][row.external_id] = &row;

  std::vector<std::string> ids = subset;
  std::sort(ids.begin(), ids.end());
  for (const std::string& id : ids)
    for (std::size_t t = 0; t < tables.size(); ++t)
      if (!by_id[t].contains(id))
        throw DataError("player " + id + " missing from the cutoff-" +
                        std::to_string(tables[t].cutoff) + " table");

  CutoffCorrelation corr;
  for (std::size_t a = 0; a < tables.size(); ++a) {
    for (std::size_t b = a + 1; b < tables.size(); ++b) {
      std::vector<double> x, y;
      x.reserve(ids.size());
      y.reserve(ids.size());
      for (const std::string& id : ids) {
        const AvgRankRow* ra = by_id[a].at(id);
        const AvgRankRow* rb = by_id[b].at(id);
        x.push_back(ra->avg_rank);
        y.push_back(rb->avg_rank);
        corr.scatter.push_back({id, ra->name, tables[a].cutoff, tables[b].cutoff,
                                ra->avg_rank, rb->avg_rank});
      }
      CutoffPairFit pair;
      pair.cutoff_a = tables[a].cutoff;
      pair.cutoff_b = tables[b].cutoff;
      pair.fit = ols_fit(x, y);
      pair.points = static_cast<std::int64_t>(ids.size());
      corr.fits.push_back(pair);
    }
  }
  return corr;
}

void write_scatter_csv(const CutoffCorrelation& corr, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "external_id,name,cutoff_a,cutoff_b,avg_rank_a,avg_rank_b\n";
  for (const ScatterPoint& p : corr.scatter) {
    out << sanitize_csv_field(p.external_id) << "," << sanitize_csv_field(p.name) << ","
        << p.cutoff_a << "," << p.cutoff_b << "," << format_double(p.rank_a) << ","
        << format_double(p.rank_b) << "\n";
  }
  write_text_file(path, out.str());
}

void write_fit_csv(const CutoffCorrelation& corr, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "cutoff_a,cutoff_b,points,slope,intercept,r_squared,defined\n";
  for (const CutoffPairFit& f : corr.fits) {
    out << f.cutoff_a << "," << f.cutoff_b << "," << f.points << ",";
    if (f.fit.defined) {
      out << format_double(f.fit.slope) << "," << format_double(f.fit.intercept) << ","
          << format_double(f.fit.r_squared) << ",true\n";
    } else {
      out << ",,,false\n";
    }
  }
  write_text_file(path, out.str());
}

void export_hasse(const DominancePoset& poset, std::span<const PlayerId> roster,
                  const std::filesystem::path& path, const std::string& fingerprint) {
  if (static_cast<int>(roster.size()) != poset.n)
    throw StructuralError("roster size does not match the poset");
  std::ostringstream out;
  out << "digraph dominance {\n";
  out << "  graph [rankdir=\"LR\", comment=\"manifest_fingerprint=" << fingerprint
      << "\"];\n";
  out << "  node [shape=box];\n";
  for (int i = 0; i < poset.n; ++i)
    out << "  p" << i << " [label=\"" << escape_dot(roster[i].display_name) << "\"];\n";
  for (const auto& [better, worse] : poset.cover_edges)
    out << "  p" << better << " -> p" << worse << ";\n";
  out << "}\n";
  write_text_file(path, out.str());
}

void write_poset_json(const DominancePoset& poset, std::span<const PlayerId> roster,
                      int cutoff, const WalkConfig& walk, int chains,
                      const std::string& fingerprint,
                      const EmpiricalRankDistribution* cdfs,
                      const std::filesystem::path& path) {
  if (static_cast<int>(roster.size()) != poset.n)
    throw StructuralError("roster size does not match the poset");
  ordered_json doc;
  doc["schema"] = "rankwalk-poset/1";
  doc["tool_version"] = std::string(kToolVersion);
  doc["manifest_fingerprint"] = fingerprint;
  doc["cutoff"] = cutoff;
  doc["epsilon"] = poset.epsilon;
  doc["sample_count"] = poset.sample_count;
  doc["walk"] = {{"seed", walk.seed},
                 {"burn_in", walk.burn_in_steps},
                 {"thin", walk.thin_steps},
                 {"samples", walk.num_samples},
                 {"initial", std::string(to_string(walk.initial_state))},
                 {"chains", chains},
                 {"rng", std::string(kRngAlgorithm)}};
  doc["roster"] = ordered_json::array();
  for (const PlayerId& p : roster)
    doc["roster"].push_back({{"id", p.external_id}, {"name", p.display_name}});
  doc["cover_edges"] = ordered_json::array();
  for (const auto& [better, worse] : poset.cover_edges)
    doc["cover_edges"].push_back({better, worse});
  doc["maximal"] = poset.maximal;
  if (cdfs != nullptr) {
    if (cdfs->n != poset.n)
      throw StructuralError("CDF matrix does not match the poset");
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < cdfs->n; ++i) {
      ordered_json row = ordered_json::array();
      for (int k = 1; k <= cdfs->n; ++k) row.push_back(cdfs->at(i, k));
      rows.push_back(std::move(row));
    }
    doc["cdf"] = std::move(rows);
  }
  write_text_file(path, doc.dump(2) + "\n");
}

PosetDocument read_poset_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open poset file " + path.string());
  ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw DataError("invalid JSON in " + path.string() + ": " + e.what());
  }
  try {
    if (doc.at("schema").get<std::string>() != "rankwalk-poset/1")
      throw DataError("unsupported poset schema in " + path.string());
    PosetDocument out;
    out.cutoff = doc.at("cutoff").get<int>();
    out.fingerprint = doc.at("manifest_fingerprint").get<std::string>();
    for (const auto& entry : doc.at("roster"))
      out.roster.push_back({entry.at("id").get<std::string>(),
                            entry.at("name").get<std::string>()});
    std::vector<std::pair<int, int>> covers;
    for (const auto& edge : doc.at("cover_edges"))
      covers.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
    out.poset = poset_from_covers(static_cast<int>(out.roster.size()), covers,
                                  doc.at("epsilon").get<double>(),
                                  doc.at("sample_count").get<std::int64_t>());
    return out;
  } catch (const ordered_json::exception& e) {
    throw DataError("malformed poset document " + path.string() + ": " + e.what());
  }
}

void dump_weight_matrix(const WeightMatrix& w, std::span<const PlayerId> roster,
                        const std::filesystem::path& path) {
  if (static_cast<int>(roster.size()) != w.n)
    throw StructuralError("roster size does not match the weight matrix");
  std::ostringstream out;
  out << "player";
  for (const PlayerId& p : roster) out << "\t" << p.external_id;
  out << "\n";
  for (int i = 0; i < w.n; ++i) {
    out << roster[i].external_id;
    for (int j = 0; j < w.n; ++j) out << "\t" << format_double(w.at(i, j));
    out << "\n";
  }
  write_text_file(path, out.str());
}

PipelineResult run_pipeline(const RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> log_lines;
  const auto log = [&](const std::string& line) { log_lines.push_back(line); };

  if (manifest.ranking_files.empty())
    throw DataError("no ranking files given [stage=ingest " + manifest_echo(manifest) + "]");

  // --- ingest ---------------------------------------------------------
  auto stage_start = std::chrono::steady_clock::now();
  const std::string input_fp =
      run_stage("ingest", manifest, [&] { return input_fingerprint(manifest); });
  SnapshotCollection collection = run_stage("ingest", manifest, [&] {
    std::vector<RawRecord> records;
    for (const auto& file : manifest.ranking_files) {
      std::vector<RawRecord> part = parse_snapshot_file(file);
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    const std::map<std::string, std::string> names =
        manifest.players_file.empty() ? std::map<std::string, std::string>{}
                                      : parse_players_file(manifest.players_file);
    return apply_cutoff(records, manifest.cutoff, names);
  });
  {
    std::ostringstream os;
    os << "stage=ingest files=" << manifest.ranking_files.size()
       << " snapshots=" << collection.snapshots.size()
       << " dropped_dates=" << collection.dropped_dates << " n=" << collection.n
       << " elapsed_ms=" << elapsed_ms(stage_start);
    log(os.str());
  }

  const RunManifest resolved = resolve_manifest(manifest, collection.n);
  const std::string fingerprint = manifest_fingerprint(resolved, input_fp);

  // --- weights --------------------------------------------------------
  stage_start = std::chrono::steady_clock::now();
  PairIncidence incidence;
  WeightMatrix w = run_stage("weights", resolved, [&] {
    incidence = build_incidence(collection);
    return build_weights(incidence);
  });
  {
    std::ostringstream os;
    os << "stage=weights n=" << w.n << " elapsed_ms=" << elapsed_ms(stage_start);
    log(os.str());
  }

  std::filesystem::create_directories(resolved.out_dir);
  const std::string tag = "k" + std::to_string(resolved.cutoff);
  if (resolved.dump_weights) {
    run_stage("weights", resolved, [&] {
      dump_weight_matrix(w, collection.roster, resolved.out_dir / ("weights-" + tag + ".tsv"));
      return 0;
    });
  }

  // --- walk -----------------------------------------------------------
  stage_start = std::chrono::steady_clock::now();
  SampleSet samples = run_stage("walk", resolved, [&] {
    return run_chains(w, resolved.walk, resolved.chains, incidence.appearances,
                      fingerprint);
  });
  {
    std::ostringstream os;
    os << "stage=walk samples=" << samples.samples.size() << " chains=" << samples.chains
       << " seed=" << resolved.walk.seed << " burn_in=" << resolved.walk.burn_in_steps
       << " thin=" << resolved.walk.thin_steps << " total_steps=" << samples.total_steps
       << " elapsed_ms=" << elapsed_ms(stage_start);
    log(os.str());
  }
  if (resolved.dump_samples) {
    run_stage("walk", resolved, [&] {
      save_samples(samples, resolved.out_dir / ("samples-" + tag + ".txt"));
      return 0;
    });
  }

  // --- dominance ------------------------------------------------------
  stage_start = std::chrono::steady_clock::now();
  EmpiricalRankDistribution cdfs;
  DominancePoset poset = run_stage("dominance", resolved, [&] {
    cdfs = empirical_cdfs(samples);
    return build_poset(cdfs, resolved.epsilon);
  });
  {
    std::ostringstream os;
    os << "stage=dominance epsilon=" << format_double(resolved.epsilon)
       << " cover_edges=" << poset.cover_edges.size() << " maximal=" << poset.maximal.size()
       << " elapsed_ms=" << elapsed_ms(stage_start);
    log(os.str());
  }

  // --- linext ---------------------------------------------------------
  stage_start = std::chrono::steady_clock::now();
  AvgRankReport avg = run_stage("linext", resolved, [&] {
    const std::vector<LinearExtension> exts =
        sample_extensions(poset, resolved.extensions, resolved.walk.seed, resolved.linext);
    return average_ranks(exts);
  });
  {
    std::ostringstream os;
    os << "stage=linext extensions=" << avg.extensions_sampled
       << " elapsed_ms=" << elapsed_ms(stage_start);
    log(os.str());
  }

  // --- artifacts ------------------------------------------------------
  PipelineResult result;
  result.cutoff = resolved.cutoff;
  result.fingerprint = fingerprint;
  result.poset_path = resolved.out_dir / ("poset-" + tag + ".json");
  result.hasse_path = resolved.out_dir / ("hasse-" + tag + ".dot");
  result.avg_ranks_path = resolved.out_dir / ("avg-ranks-" + tag + ".csv");
  result.log_path = resolved.out_dir / ("run-" + tag + ".log");
  run_stage("artifacts", resolved, [&] {
    write_poset_json(poset, collection.roster, resolved.cutoff, resolved.walk,
                     resolved.chains, fingerprint, resolved.emit_cdfs ? &cdfs : nullptr,
                     result.poset_path);
    export_hasse(poset, collection.roster, result.hasse_path, fingerprint);
    const AvgRankTable table =
        make_avg_rank_table(avg, collection.roster, resolved.cutoff, fingerprint);
    write_avg_rank_csv(table, result.avg_ranks_path);
    return 0;
  });
  {
    std::ostringstream os;
    os << "stage=artifacts fingerprint=" << fingerprint
       << " poset=" << result.poset_path.filename().string()
       << " hasse=" << result.hasse_path.filename().string()
       << " avg_ranks=" << result.avg_ranks_path.filename().string()
       << " total_elapsed_ms=" << elapsed_ms(start);
    log(os.str());
  }
  {
    std::ostringstream os;
    for (const std::string& line : log_lines) os << line << "\n";
    write_text_file(result.log_path, os.str());
  }

  result.collection = std::move(collection);
  result.poset = std::move(poset);
  result.avg_ranks = std::move(avg);
  return result;
}

}  // namespace rankwalk
