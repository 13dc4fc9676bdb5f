#include "rankwalk/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "rankwalk/errors.hpp"
#include "rankwalk/util.hpp"

namespace rankwalk {

namespace {

bool parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string line_context(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

}  // namespace

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d", year, month, day);
  return buf;
}

Date parse_date_yyyymmdd(std::string_view token) {
  token = trim(token);
  long long v = 0;
  if (token.size() != 8 || !parse_int(token, v))
    throw DataError("expected 8-digit YYYYMMDD date, got '" + std::string(token) + "'");
  Date d{static_cast<int>(v / 10000), static_cast<int>(v / 100 % 100),
         static_cast<int>(v % 100)};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    throw DataError("implausible calendar date '" + std::string(token) + "'");
  return d;
}

std::vector<RawRecord> parse_snapshot_file(const std::filesystem::path& path,
                                           SnapshotFormat format) {
  (void)format;  // single source layout today
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ranking file " + path.string());

  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    const auto fields = split(stripped, ',');

    // A header is a first line whose rank column is not an integer.
    if (line_no == 1 && fields.size() >= 2) {
      long long probe = 0;
      if (!parse_int(fields[1], probe)) continue;
    }

    if (fields.size() < 3)
      throw DataError("expected at least 3 fields at " + line_context(path, line_no));

    RawRecord rec;
    try {
      rec.date = parse_date_yyyymmdd(fields[0]);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " at " + line_context(path, line_no));
    }

    long long rank = 0;
    if (!parse_int(fields[1], rank) || rank < 1)
      throw DataError("rank must be a positive integer at " + line_context(path, line_no));
    rec.rank_value = static_cast<int>(rank);

    rec.external_id = std::string(trim(fields[2]));
    if (rec.external_id.empty())
      throw DataError("empty player id at " + line_context(path, line_no));

    // Points are informational only; treat anything unreadable as absent.
    // Columns past the fourth are ignored.
    if (fields.size() >= 4) {
      long long points = 0;
      if (parse_int(fields[3], points)) rec.points = points;
    }
    records.push_back(std::move(rec));
  }
  if (records.empty())
    throw DataError("no ranking rows in " + path.string());
  return records;
}

std::map<std::string, std::string> parse_players_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open players file " + path.string());

  std::map<std::string, std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    const auto fields = split(stripped, ',');
    if (fields.size() < 3) {
      if (line_no == 1) continue;  // header variants
      throw DataError("expected at least 3 fields at " + line_context(path, line_no));
    }
    const std::string id(trim(fields[0]));
    if (line_no == 1) {
      long long probe = 0;
      if (!parse_int(id, probe)) continue;  // header line
    }
    if (id.empty())
      throw DataError("empty player id at " + line_context(path, line_no));
    std::string first(trim(fields[1]));
    std::string last(trim(fields[2]));
    std::string full = first;
    if (!first.empty() && !last.empty()) full += " ";
    full += last;
    if (full.empty()) full = id;
    names[id] = std::move(full);
  }
  return names;
}

SnapshotCollection apply_cutoff(const std::vector<RawRecord>& records, int cutoff,
                                const std::map<std::string, std::string>& names) {
  if (cutoff < 1) throw StructuralError("cutoff must be at least 1");

  struct Provisional {
    int rank_value;
    std::string external_id;
  };
  std::map<Date, std::vector<Provisional>> by_date;
  std::set<std::pair<std::string, std::string>> seen;  // (date, id)
  int dropped = 0;

  for (const auto& rec : records) {
    if (!seen.emplace(rec.date.to_string(), rec.external_id).second)
      throw DataError("duplicate entry for player " + rec.external_id + " on " +
                      rec.date.to_string());
    if (rec.rank_value > cutoff) continue;
    by_date[rec.date].push_back({rec.rank_value, rec.external_id});
  }

  // Count dates that existed in the input but lost every row to the cutoff.
  {
    std::set<Date> all_dates;
    for (const auto& rec : records) all_dates.insert(rec.date);
    dropped = static_cast<int>(all_dates.size() - by_date.size());
  }

  SnapshotCollection out;
  out.dropped_dates = dropped;
  std::unordered_map<std::string, int> index_of;

  for (auto& [date, rows] : by_date) {  // std::map iterates dates ascending
    std::sort(rows.begin(), rows.end(), [](const Provisional& a, const Provisional& b) {
      if (a.rank_value != b.rank_value) return a.rank_value < b.rank_value;
      return a.external_id < b.external_id;
    });
    RankingSnapshot snap;
    snap.date = date;
    for (auto& row : rows) {
      auto [it, inserted] = index_of.try_emplace(row.external_id,
                                                 static_cast<int>(out.roster.size()));
      if (inserted) {
        auto name_it = names.find(row.external_id);
        out.roster.push_back({row.external_id,
                              name_it != names.end() ? name_it->second : row.external_id});
      }
      snap.entries.push_back({it->second, row.rank_value});
    }
    out.snapshots.push_back(std::move(snap));
  }
  out.n = static_cast<int>(out.roster.size());
  if (out.snapshots.empty())
    throw DataError("cutoff " + std::to_string(cutoff) + " leaves no usable snapshots");
  return out;
}

PairIncidence build_incidence(const SnapshotCollection& collection) {
  const int n = collection.n;
  PairIncidence inc;
  inc.n = n;
  inc.appearances.assign(n, 0);
  inc.co_appearance.assign(static_cast<std::size_t>(n) * n, 0);
  inc.beat.assign(static_cast<std::size_t>(n) * n, 0);

  for (const auto& snap : collection.snapshots) {
    for (std::size_t a = 0; a < snap.entries.size(); ++a) {
      const auto& ea = snap.entries[a];
      ++inc.appearances[ea.player];
      for (std::size_t b = a + 1; b < snap.entries.size(); ++b) {
        const auto& eb = snap.entries[b];
        ++inc.co_appearance[static_cast<std::size_t>(ea.player) * n + eb.player];
        ++inc.co_appearance[static_cast<std::size_t>(eb.player) * n + ea.player];
        // entries are sorted by rank, so ea can only beat eb; equal ranks
        // count for neither side.
        if (ea.rank_value < eb.rank_value)
          ++inc.beat[static_cast<std::size_t>(ea.player) * n + eb.player];
        else if (eb.rank_value < ea.rank_value)
          ++inc.beat[static_cast<std::size_t>(eb.player) * n + ea.player];
      }
    }
  }
  return inc;
}

}  // namespace rankwalk
