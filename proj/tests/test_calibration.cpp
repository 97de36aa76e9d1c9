#include <doctest.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <numeric>
#include <string>

#include "chaos/calibration.hpp"
#include "chaos/errors.hpp"
#include "support/fixtures.hpp"

using namespace chaos;

namespace {

ResponseMatrix single_row(PerturbationKind kind, std::array<int, 10> row,
                          int total = 42) {
  ResponseMatrix m;
  m.total_participants = total;
  m.counts[kind] = row;
  return m;
}

// Independent derivation used to cross-check calibrate(): accumulate-based
// tail sums for easy, reverse max_element for the severe-tie mode.
struct NaiveTriple {
  int easy = 1, mid = 1, hard = 1;
};

NaiveTriple naive_triple(const std::array<int, 10>& row, int needed) {
  NaiveTriple t;
  for (int level = 10; level >= 1; --level) {
    int tail = std::accumulate(row.begin() + (level - 1), row.end(), 0);
    if (tail >= needed) {
      t.easy = level;
      break;
    }
  }
  auto rmax = std::max_element(row.rbegin(), row.rend());
  t.mid = 10 - static_cast<int>(rmax - row.rbegin());
  auto rnz = std::find_if(row.rbegin(), row.rend(), [](int v) { return v > 0; });
  t.hard = 10 - static_cast<int>(rnz - row.rbegin());
  return t;
}

}  // namespace

TEST_CASE("study matrix produces the frozen level triples") {
  auto path = std::filesystem::path(CHAOS_DATA_DIR) / "response_matrix_study.csv";
  ResponseMatrix m = ResponseMatrix::load_csv(path);
  CHECK(m.total_participants == 42);
  REQUIRE(m.counts.size() == 15);

  CalibrationOutcome out = calibrate(m);
  CHECK(out.warnings.empty());

  struct Expected {
    PerturbationKind kind;
    int easy, mid, hard;
  };
  const Expected table[] = {
      {PerturbationKind::DF, 4, 6, 9},  {PerturbationKind::VB, 3, 5, 9},
      {PerturbationKind::WP, 3, 5, 9},  {PerturbationKind::OM, 2, 5, 9},
      {PerturbationKind::IB, 3, 6, 9},  {PerturbationKind::IH, 3, 6, 9},
      {PerturbationKind::OB, 2, 5, 8},  {PerturbationKind::FD, 4, 6, 10},
      {PerturbationKind::SP, 3, 5, 9},  {PerturbationKind::TX, 4, 6, 10},
      {PerturbationKind::CA, 3, 5, 9},  {PerturbationKind::CD, 3, 5, 9},
      {PerturbationKind::CR, 3, 5, 9},  {PerturbationKind::CS, 2, 5, 9},
      {PerturbationKind::WM, 3, 6, 9},
  };
  for (const Expected& e : table) {
    INFO("kind ", kind_code(e.kind));
    const NamedLevels& got = out.triples.at(e.kind);
    CHECK(got.easy == e.easy);
    CHECK(got.mid == e.mid);
    CHECK(got.hard == e.hard);
  }

  // every row must also agree with the independent derivation
  int needed = 38;  // ceil(0.9 * 42)
  for (const auto& [kind, row] : m.counts) {
    NaiveTriple naive = naive_triple(row, needed);
    const NamedLevels& got = out.triples.at(kind);
    CHECK(got.easy == naive.easy);
    CHECK(got.mid == naive.mid);
    CHECK(got.hard == naive.hard);
  }
}

TEST_CASE("declining synthetic row lands on the documented triple") {
  // 42 participants, counts fall off steeply with severity
  std::array<int, 10> row = {40, 38, 36, 30, 22, 14, 8, 4, 1, 0};
  ResponseMatrix m = single_row(PerturbationKind::WP, row);
  CalibrationOutcome out = calibrate(m);
  const NamedLevels& t = out.triples.at(PerturbationKind::WP);
  CHECK(t.easy == 5);
  CHECK(t.mid == 1);
  CHECK(t.hard == 9);
  // easy > mid: the rule set cannot order this row, and says so
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("easy <= mid <= hard") != std::string::npos);

  NaiveTriple naive = naive_triple(row, 38);
  CHECK(naive.easy == 5);
  CHECK(naive.mid == 1);
  CHECK(naive.hard == 9);
}

TEST_CASE("saturated row collapses to the most severe level") {
  std::array<int, 10> row;
  row.fill(42);
  CalibrationOutcome out = calibrate(single_row(PerturbationKind::DF, row));
  const NamedLevels& t = out.triples.at(PerturbationKind::DF);
  CHECK(t.easy == 10);
  CHECK(t.mid == 10);
  CHECK(t.hard == 10);
  CHECK(out.warnings.empty());
}

TEST_CASE("modal ties break toward the more severe level") {
  std::array<int, 10> row = {0, 0, 12, 5, 12, 3, 2, 1, 0, 0};
  CalibrationOutcome out = calibrate(single_row(PerturbationKind::VB, row));
  CHECK(out.triples.at(PerturbationKind::VB).mid == 5);
}

TEST_CASE("all-zero rows are rejected") {
  std::array<int, 10> row{};
  ResponseMatrix m = single_row(PerturbationKind::SP, row);
  CHECK_THROWS_AS(calibrate(m), ConfigError);
}

TEST_CASE("unreachable threshold falls back to level one with a warning") {
  std::array<int, 10> row = {2, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  CalibrationOutcome out = calibrate(single_row(PerturbationKind::OB, row));
  const NamedLevels& t = out.triples.at(PerturbationKind::OB);
  CHECK(t.easy == 1);
  CHECK(t.mid == 1);
  CHECK(t.hard == 2);
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("never reached") != std::string::npos);
}

TEST_CASE("custom thresholds replace the ninety percent rule") {
  std::array<int, 10> row = {0, 1, 3, 5, 9, 12, 6, 4, 2, 0};
  ResponseMatrix m = single_row(PerturbationKind::DF, row);
  // any single correct answer counts: easy climbs to the hard level
  CalibrationOutcome out = calibrate(m, [](int) { return 1; });
  const NamedLevels& t = out.triples.at(PerturbationKind::DF);
  CHECK(t.easy == 9);
  CHECK(t.mid == 6);
  CHECK(t.hard == 9);
  REQUIRE(out.warnings.size() == 1);  // easy outranks mid now

  // unanimous agreement: level 1 contributes nothing, so the tail already
  // reaches 42 one level up
  CalibrationOutcome strict = calibrate(m, [](int total) { return total; });
  CHECK(strict.triples.at(PerturbationKind::DF).easy == 2);
  CHECK(strict.triples.at(PerturbationKind::DF).easy ==
        naive_triple(row, 42).easy);
}

TEST_CASE("matrix validation bounds every cell") {
  std::array<int, 10> row = {0, 1, 3, 5, 9, 12, 6, 4, 2, 0};
  ResponseMatrix bad_total = single_row(PerturbationKind::DF, row, 0);
  CHECK_THROWS_AS(bad_total.validate(), ConfigError);

  std::array<int, 10> over = row;
  over[3] = 43;
  CHECK_THROWS_AS(single_row(PerturbationKind::DF, over).validate(), ConfigError);

  std::array<int, 10> neg = row;
  neg[0] = -1;
  CHECK_THROWS_AS(single_row(PerturbationKind::DF, neg).validate(), ConfigError);
}

TEST_CASE("csv loader rejects malformed matrices") {
  testsupport::TempDir dir;
  auto write = [&](const char* name, const std::string& body) {
    auto p = dir / name;
    testsupport::write_text_file(p, body);
    return p;
  };
  const std::string header = "kind,l1,l2,l3,l4,l5,l6,l7,l8,l9,l10,total\n";
  const std::string df = "DF,0,1,3,5,9,12,6,4,2,0,42\n";

  CHECK_THROWS_AS(ResponseMatrix::load_csv(dir / "missing.csv"), IoError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(write("short_header.csv",
                                     "kind,l1,l2,l3,total\n" + df)),
      ConfigError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(write("short_row.csv",
                                     header + "DF,1,2,3,42\n")),
      ConfigError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(write("unknown.csv",
                                     header + "ZZ,0,1,3,5,9,12,6,4,2,0,42\n")),
      ConfigError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(write("dupe.csv", header + df + df)),
      ConfigError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(
          write("totals.csv",
                header + df + "VB,1,2,4,7,12,8,4,3,1,0,40\n")),
      ConfigError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(write("nonint.csv",
                                     header + "DF,0,1,3x,5,9,12,6,4,2,0,42\n")),
      ConfigError);
  CHECK_THROWS_AS(
      ResponseMatrix::load_csv(write("oob.csv",
                                     header + "DF,0,1,3,5,9,12,6,4,2,50,42\n")),
      ConfigError);
  CHECK_THROWS_AS(ResponseMatrix::load_csv(write("empty.csv", header)),
                  ConfigError);
}

TEST_CASE("csv loader skips comments and survives a round trip") {
  testsupport::TempDir dir;
  auto src = dir / "m.csv";
  testsupport::write_text_file(
      src,
      "# study counts\n"
      "\n"
      "kind,l1,l2,l3,l4,l5,l6,l7,l8,l9,l10,total\n"
      "WP,1,2,4,6,11,7,5,2,4,0,42\n"
      "CA,1,2,5,8,12,7,4,2,1,0,42\n");
  ResponseMatrix m = ResponseMatrix::load_csv(src);
  CHECK(m.total_participants == 42);
  CHECK(m.counts.size() == 2);
  CHECK(m.counts.at(PerturbationKind::WP)[4] == 11);

  auto copy = dir / "copy.csv";
  m.save_csv(copy);
  ResponseMatrix back = ResponseMatrix::load_csv(copy);
  CHECK(back.total_participants == m.total_participants);
  CHECK(back.counts == m.counts);
}

TEST_CASE("heatmap marks derived tiers per level") {
  std::array<int, 10> row = {1, 2, 4, 6, 11, 7, 5, 2, 4, 0};
  ResponseMatrix m = single_row(PerturbationKind::WP, row);
  CalibrationOutcome out = calibrate(m);
  std::string csv = heatmap_csv(m, out);

  CHECK(csv.find("kind,level,count,tier\n") == 0);
  CHECK(csv.find("WP,3,4,easy\n") != std::string::npos);
  CHECK(csv.find("WP,5,11,mid\n") != std::string::npos);
  CHECK(csv.find("WP,9,4,hard\n") != std::string::npos);
  CHECK(csv.find("WP,1,1,\n") != std::string::npos);
  // header plus one line per level
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("heatmap concatenates tier names when levels coincide") {
  std::array<int, 10> row;
  row.fill(42);
  ResponseMatrix m = single_row(PerturbationKind::TX, row);
  CalibrationOutcome out = calibrate(m);
  std::string csv = heatmap_csv(m, out);
  CHECK(csv.find("TX,10,42,easy+mid+hard\n") != std::string::npos);
}
