#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "rankwalk/errors.hpp"
#include "rankwalk/ingest.hpp"
#include "test_support.hpp"

using namespace rankwalk;
using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("row fields map directly onto a record") {
  TempDir dir("ingest");
  const auto path = write_file(dir.file("one.csv"), "19900101,1,101736,3000\n");
  const auto records = parse_snapshot_file(path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].date == Date{1990, 1, 1});
  CHECK(records[0].rank_value == 1);
  CHECK(records[0].external_id == "101736");
  CHECK(records[0].points == 3000);
}

TEST_CASE("header line is skipped") {
  TempDir dir("ingest");
  const auto path = write_file(dir.file("hdr.csv"),
                               "ranking_date,rank,player,points\n"
                               "19900101,1,A,100\n"
                               "19900101,2,B,90\n");
  CHECK(parse_snapshot_file(path).size() == 2);
}

TEST_CASE("malformed rows name their line") {
  TempDir dir("ingest");
  SUBCASE("unparseable rank") {
    const auto path = write_file(dir.file("rank.csv"),
                                 "19900101,1,A,100\n19900108,one,A,100\n");
    CHECK_THROWS_WITH_AS(parse_snapshot_file(path),
                         doctest::Contains(":2"), DataError);
  }
  SUBCASE("zero rank") {
    const auto path = write_file(dir.file("zero.csv"), "19900101,0,A,100\n");
    CHECK_THROWS_AS(parse_snapshot_file(path), DataError);
  }
  SUBCASE("bad date") {
    const auto path = write_file(dir.file("date.csv"), "1990-01-01,1,A,100\n");
    CHECK_THROWS_AS(parse_snapshot_file(path), DataError);
  }
  SUBCASE("implausible month") {
    const auto path = write_file(dir.file("month.csv"), "19901301,1,A,100\n");
    CHECK_THROWS_AS(parse_snapshot_file(path), DataError);
  }
  SUBCASE("too few fields") {
    const auto path = write_file(dir.file("arity.csv"), "19900101,1\n");
    CHECK_THROWS_WITH_AS(parse_snapshot_file(path),
                         doctest::Contains(":1"), DataError);
  }
  SUBCASE("empty player id") {
    const auto path = write_file(dir.file("id.csv"), "19900101,1,,100\n");
    CHECK_THROWS_AS(parse_snapshot_file(path), DataError);
  }
}

TEST_CASE("points are lenient and trailing columns are ignored") {
  TempDir dir("ingest");
  const auto path = write_file(dir.file("loose.csv"),
                               "19900101,1,A\n"
                               "19900101,2,B,\n"
                               "19900101,3,C,n/a\n"
                               "19900101,4,D,250,extra,columns\n");
  const auto records = parse_snapshot_file(path);
  REQUIRE(records.size() == 4);
  CHECK(records[0].points == 0);
  CHECK(records[1].points == 0);
  CHECK(records[2].points == 0);
  CHECK(records[3].points == 250);
}

TEST_CASE("empty or missing files are data errors") {
  TempDir dir("ingest");
  CHECK_THROWS_AS(parse_snapshot_file(dir.file("absent.csv")), DataError);
  const auto empty = write_file(dir.file("empty.csv"), "");
  CHECK_THROWS_AS(parse_snapshot_file(empty), DataError);
  const auto header_only = write_file(dir.file("hdr.csv"), "ranking_date,rank,player,points\n");
  CHECK_THROWS_AS(parse_snapshot_file(header_only), DataError);
}

TEST_CASE("cutoff keeps the top of each date") {
  std::vector<RawRecord> records;
  for (int r = 1; r <= 100; ++r)
    records.push_back({Date{1990, 1, 1}, r, "p" + std::to_string(r), 0});
  const SnapshotCollection col = apply_cutoff(records, 10);
  REQUIRE(col.snapshots.size() == 1);
  CHECK(col.snapshots[0].entries.size() == 10);
  CHECK(col.n == 10);
  CHECK(col.dropped_dates == 0);
  for (const auto& entry : col.snapshots[0].entries) CHECK(entry.rank_value <= 10);
}

TEST_CASE("boundary ties at the cutoff are all kept") {
  std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "A", 0},
                                 {Date{1990, 1, 1}, 2, "B", 0},
                                 {Date{1990, 1, 1}, 2, "C", 0},
                                 {Date{1990, 1, 1}, 3, "D", 0}};
  const SnapshotCollection col = apply_cutoff(records, 2);
  REQUIRE(col.snapshots.size() == 1);
  CHECK(col.snapshots[0].entries.size() == 3);  // the rank-2 tie stays whole
  CHECK(col.n == 3);
}

TEST_CASE("roster is the union of players inside the cutoff") {
  std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "A", 0},
                                 {Date{1990, 1, 1}, 2, "B", 0},
                                 {Date{1990, 1, 1}, 3, "C", 0},
                                 {Date{1990, 1, 8}, 1, "B", 0},
                                 {Date{1990, 1, 8}, 2, "D", 0},
                                 {Date{1990, 1, 8}, 3, "A", 0},
                                 {Date{1990, 1, 8}, 4, "E", 0}};
  const SnapshotCollection col = apply_cutoff(records, 3);
  CHECK(col.n == 4);  // E never makes the cutoff
  // First-appearance order: A, B, C from the first date, then D.
  REQUIRE(col.roster.size() == 4);
  CHECK(col.roster[0].external_id == "A");
  CHECK(col.roster[1].external_id == "B");
  CHECK(col.roster[2].external_id == "C");
  CHECK(col.roster[3].external_id == "D");
}

TEST_CASE("dates left empty by the cutoff are dropped but counted") {
  std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "A", 0},
                                 {Date{1990, 1, 8}, 5, "B", 0},
                                 {Date{1990, 1, 15}, 1, "A", 0}};
  const SnapshotCollection col = apply_cutoff(records, 3);
  CHECK(col.snapshots.size() == 2);
  CHECK(col.dropped_dates == 1);
  CHECK(col.n == 1);
}

TEST_CASE("duplicate date-player rows are rejected") {
  std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "A", 0},
                                 {Date{1990, 1, 1}, 7, "A", 0}};
  CHECK_THROWS_AS(apply_cutoff(records, 10), DataError);
}

TEST_CASE("cutoff must be positive and must leave data") {
  std::vector<RawRecord> records{{Date{1990, 1, 1}, 5, "A", 0}};
  CHECK_THROWS_AS(apply_cutoff(records, 0), StructuralError);
  CHECK_THROWS_AS(apply_cutoff(records, 3), DataError);  // everything dropped
}

TEST_CASE("players file resolves display names, unknown ids fall back") {
  TempDir dir("ingest");
  const auto players = write_file(dir.file("players.csv"),
                                  "player_id,name_first,name_last,hand,dob,ioc\n"
                                  "7,Rod,Laver,R,19380809,AUS\n");
  const auto names = parse_players_file(players);
  REQUIRE(names.size() == 1);
  CHECK(names.at("7") == "Rod Laver");

  std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "7", 0},
                                 {Date{1990, 1, 1}, 2, "8", 0}};
  const SnapshotCollection col = apply_cutoff(records, 2, names);
  CHECK(col.roster[0].display_name == "Rod Laver");
  CHECK(col.roster[1].display_name == "8");
}

TEST_CASE("incidence counts on a three-snapshot instance") {
  // r1: A>B; r2: B>A; r3: A>B>C.
  std::vector<RawRecord> records{
      {Date{1990, 1, 1}, 1, "A", 0},  {Date{1990, 1, 1}, 2, "B", 0},
      {Date{1990, 1, 8}, 1, "B", 0},  {Date{1990, 1, 8}, 2, "A", 0},
      {Date{1990, 1, 15}, 1, "A", 0}, {Date{1990, 1, 15}, 2, "B", 0},
      {Date{1990, 1, 15}, 3, "C", 0}};
  const SnapshotCollection col = apply_cutoff(records, 3);
  REQUIRE(col.n == 3);
  const int A = 0, B = 1, C = 2;
  CHECK(col.roster[A].external_id == "A");

  const PairIncidence inc = build_incidence(col);
  CHECK(inc.appearances[A] == 3);
  CHECK(inc.appearances[B] == 3);
  CHECK(inc.appearances[C] == 1);
  CHECK(inc.beats(A, B) == 2);
  CHECK(inc.beats(B, A) == 1);
  CHECK(inc.co(A, B) == 3);
  CHECK(inc.beats(A, C) == 1);
  CHECK(inc.beats(C, A) == 0);
  CHECK(inc.beats(B, C) == 1);
  CHECK(inc.co(A, C) == 1);
  CHECK(inc.co(B, C) == 1);
  CHECK(inc.co(A, A) == 0);
}

TEST_CASE("single comparison and tie conventions") {
  SUBCASE("one snapshot A>B") {
    std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "A", 0},
                                   {Date{1990, 1, 1}, 2, "B", 0}};
    const PairIncidence inc = build_incidence(apply_cutoff(records, 5));
    CHECK(inc.beats(0, 1) == 1);
    CHECK(inc.beats(1, 0) == 0);
  }
  SUBCASE("tied rank counts for neither") {
    std::vector<RawRecord> records{{Date{1990, 1, 1}, 1, "A", 0},
                                   {Date{1990, 1, 1}, 1, "B", 0}};
    const PairIncidence inc = build_incidence(apply_cutoff(records, 5));
    CHECK(inc.beats(0, 1) == 0);
    CHECK(inc.beats(1, 0) == 0);
    CHECK(inc.co(0, 1) == 1);
  }
}

TEST_CASE("committed five-player fixture loads with frozen counts") {
  const auto rankings = testsupport::data_dir() / "synthetic5.csv";
  const auto players = testsupport::data_dir() / "synthetic5_players.csv";
  const auto records = parse_snapshot_file(rankings);
  const SnapshotCollection col = apply_cutoff(records, 3, parse_players_file(players));

  CHECK(col.snapshots.size() == 80);
  CHECK(col.dropped_dates == 0);
  REQUIRE(col.n == 5);
  CHECK(col.roster[0].external_id == "101");
  CHECK(col.roster[0].display_name == "Ada Alder");
  CHECK(col.roster[4].display_name == "Ema Elm");

  const PairIncidence inc = build_incidence(col);
  // Appearance profile of the committed fixture at cutoff 3.
  CHECK(inc.appearances == std::vector<std::int64_t>{80, 48, 48, 32, 32});
  CHECK(inc.beats(0, 1) == 48);  // A above B in every era-1 week
  CHECK(inc.beats(1, 0) == 0);
  CHECK(inc.beats(2, 0) == 12);  // C's championship weeks
  CHECK(inc.beats(2, 1) == 12);

  // Structural invariants of the counting definitions.
  std::int64_t total_entries = 0;
  for (const auto& snap : col.snapshots) total_entries += static_cast<std::int64_t>(snap.entries.size());
  std::int64_t total_appearances = 0;
  for (const auto a : inc.appearances) total_appearances += a;
  CHECK(total_entries == total_appearances);
  for (int i = 0; i < col.n; ++i) {
    CHECK(inc.co(i, i) == 0);
    for (int j = 0; j < col.n; ++j) {
      CHECK(inc.co(i, j) == inc.co(j, i));
      if (i != j) {
        CHECK(inc.beats(i, j) + inc.beats(j, i) <= inc.co(i, j));
        CHECK(inc.co(i, j) <= std::min(inc.appearances[i], inc.appearances[j]));
      }
    }
  }
}

TEST_CASE("reloading the same files is deterministic") {
  const auto rankings = testsupport::data_dir() / "synthetic5.csv";
  const auto a = apply_cutoff(parse_snapshot_file(rankings), 3);
  const auto b = apply_cutoff(parse_snapshot_file(rankings), 3);
  REQUIRE(a.n == b.n);
  for (int i = 0; i < a.n; ++i)
    CHECK(a.roster[i].external_id == b.roster[i].external_id);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
    CHECK(a.snapshots[s].date == b.snapshots[s].date);
    REQUIRE(a.snapshots[s].entries.size() == b.snapshots[s].entries.size());
    for (std::size_t e = 0; e < a.snapshots[s].entries.size(); ++e) {
      CHECK(a.snapshots[s].entries[e].player == b.snapshots[s].entries[e].player);
      CHECK(a.snapshots[s].entries[e].rank_value == b.snapshots[s].entries[e].rank_value);
    }
  }
}
