#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rankwalk {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
  auto operator<=>(const Date&) const = default;
  std::string to_string() const;  // YYYYMMDD
};

// Parses an 8-digit YYYYMMDD token. Throws DataError on anything else.
Date parse_date_yyyymmdd(std::string_view token);

struct PlayerId {
  std::string external_id;    // token used in the source files
  std::string display_name;   // resolved name, or the token when unknown
};

// One row of a raw ranking file, before any cutoff is applied.
struct RawRecord {
  Date date;
  int rank_value = 0;
  std::string external_id;
  long long points = 0;  // optional in the source; 0 when absent or garbled
};

// Source layout of a ranking file. Only comma-separated text exists today;
// the tag keeps the call sites honest about what they are feeding in.
enum class SnapshotFormat { csv };

// Reads a ranking file (columns: date, rank, player id, optional points;
// further trailing columns are ignored). A leading header line is detected
// and skipped. Rows are returned in file order. Malformed dates, ranks,
// empty ids, or rows with fewer than three fields raise DataError naming
// the line; a file with no data rows is also an error.
std::vector<RawRecord> parse_snapshot_file(const std::filesystem::path& path,
                                           SnapshotFormat format = SnapshotFormat::csv);

// Reads a player metadata CSV (id, first name, last name, ...); returns
// id -> "First Last". Unknown ids simply stay unresolved downstream.
std::map<std::string, std::string> parse_players_file(const std::filesystem::path& path);

struct SnapshotEntry {
  int player = 0;      // dense roster index
  int rank_value = 0;  // 1-based rank in the source snapshot
};

struct RankingSnapshot {
  Date date;
  std::vector<SnapshotEntry> entries;  // ascending rank_value
};

struct SnapshotCollection {
  int n = 0;                            // roster size
  std::vector<PlayerId> roster;         // dense index -> identity
  std::vector<RankingSnapshot> snapshots;  // ascending date
  int dropped_dates = 0;                // dates left empty by the cutoff
};

// Groups records by date, keeps every row whose rank value is within the
// cutoff (boundary ties are kept, so a snapshot may hold more than `cutoff`
// entries), indexes the union of surviving players, and drops — but counts —
// dates with nothing inside the cutoff. Duplicate (date, player) rows raise
// DataError. Roster indices follow first appearance scanning snapshots in
// date order and entries by (rank, id), which makes them reproducible.
SnapshotCollection apply_cutoff(const std::vector<RawRecord>& records, int cutoff,
                                const std::map<std::string, std::string>& names = {});

// Pairwise appearance and win counts over a snapshot collection.
struct PairIncidence {
  int n = 0;
  std::vector<std::int64_t> appearances;      // per player
  std::vector<std::int64_t> co_appearance;    // n*n, symmetric
  std::vector<std::int64_t> beat;             // n*n; [i][j] = snapshots where i ranked strictly better

  std::int64_t co(int i, int j) const { return co_appearance[static_cast<std::size_t>(i) * n + j]; }
  std::int64_t beats(int i, int j) const { return beat[static_cast<std::size_t>(i) * n + j]; }
};

PairIncidence build_incidence(const SnapshotCollection& collection);

}  // namespace rankwalk
