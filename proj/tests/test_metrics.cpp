#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chaos/errors.hpp"
#include "chaos/metrics.hpp"
#include "chaos/rng.hpp"

using namespace chaos;

namespace {

std::vector<std::string> split_fields(const std::string& row) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = row.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(row.substr(start));
      return out;
    }
    out.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

TEST_CASE("normalization trims, lowercases and handles units") {
  CHECK(normalize_answer("  42 ") == "42");
  CHECK(normalize_answer("42%") == "42");
  CHECK(normalize_answer("42 %") == "42");
  CHECK(normalize_answer("YES") == "yes");
  CHECK(normalize_answer("") == "");
  CHECK(normalize_answer("$5") == "$5");
}

TEST_CASE("comma stripping only fires on exact thousands grouping") {
  CHECK(normalize_answer("1,234") == "1234");
  CHECK(normalize_answer("12,345") == "12345");
  CHECK(normalize_answer("1,234,567.8") == "1234567.8");
  CHECK(normalize_answer("-1,234") == "-1234");
  // not grouping: keep the comma so the numeric parse fails loudly
  CHECK(normalize_answer("1,23") == "1,23");
  CHECK(normalize_answer("1,2345") == "1,2345");
  CHECK(normalize_answer(",123") == ",123");
  CHECK(normalize_answer("1,234x") == "1,234x");
  CHECK(normalize_answer("1,234,56") == "1,234,56");
}

TEST_CASE("numeric parsing requires the whole string") {
  CHECK(parse_numeric("42") == 42.0);
  CHECK(parse_numeric("-3.5") == -3.5);
  CHECK(parse_numeric("1e3") == 1000.0);
  CHECK(!parse_numeric("42x"));
  CHECK(!parse_numeric("4 2"));
  CHECK(!parse_numeric(""));
  CHECK(!parse_numeric("inf"));
  CHECK(!parse_numeric("nan"));
}

TEST_CASE("relaxed matching sits exactly on the five percent boundary") {
  CHECK(relaxed_match("29", "28").correct);
  CHECK(relaxed_match("29", "30").correct);
  CHECK(!relaxed_match("29", "27.5").correct);
  CHECK(relaxed_match("100", "105").correct);   // inclusive edge
  CHECK(relaxed_match("100", "95").correct);
  CHECK(!relaxed_match("100", "105.01").correct);
  CHECK(relaxed_match("-40", "-42").correct);   // tolerance uses |gold|
  CHECK(!relaxed_match("-40", "-42.5").correct);
}

TEST_CASE("a gold of zero accepts only zero") {
  CHECK(relaxed_match("0", "0").correct);
  CHECK(relaxed_match("0", "0.00").correct);
  CHECK(relaxed_match("0", "-0").correct);
  CHECK(!relaxed_match("0", "0.001").correct);
  CHECK(!relaxed_match("0", "").correct);
}

TEST_CASE("non-numeric answers fall back to normalized equality") {
  Judgment j = relaxed_match("Green", " GREEN ");
  CHECK(j.correct);
  CHECK(!j.numeric);
  CHECK(j.gold == "green");
  CHECK(j.prediction == "green");

  CHECK(!relaxed_match("Green", "Blue").correct);
  CHECK(relaxed_match("50%", "50").correct);
  CHECK(relaxed_match("1,234", "1234").numeric);
  CHECK(!relaxed_match("42", "forty").correct);
  CHECK(!relaxed_match("", "").correct);  // empty gold never matches
}

TEST_CASE("robustness has closed-form values at the edges") {
  const double zero[] = {0.0};
  CHECK(robustness(0.6, zero) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(robustness(1.0, zero) == doctest::Approx(0.0).epsilon(1e-12));

  const double perfect[] = {1.0, 1.0, 1.0};
  CHECK(robustness(1.0, perfect) == doctest::Approx(1.0).epsilon(1e-12));

  // mean over levels, exactly
  const double a[] = {0.7}, b[] = {0.3}, ab[] = {0.7, 0.3};
  CHECK(robustness(0.8, ab) ==
        doctest::Approx((robustness(0.8, a) + robustness(0.8, b)) / 2.0));
}

TEST_CASE("robustness rejects out-of-domain inputs") {
  const double ok[] = {0.5};
  CHECK_THROWS_AS(robustness(0.0, ok), std::invalid_argument);
  CHECK_THROWS_AS(robustness(-0.1, ok), std::invalid_argument);
  CHECK_THROWS_AS(robustness(1.2, ok), std::invalid_argument);
  CHECK_THROWS_AS(robustness(81.32, ok), std::invalid_argument);  // percent misuse
  CHECK_THROWS_AS(robustness(0.8, std::span<const double>{}), std::invalid_argument);
  const double neg[] = {-0.1};
  CHECK_THROWS_AS(robustness(0.8, neg), std::invalid_argument);
  const double big[] = {1.1};
  CHECK_THROWS_AS(robustness(0.8, big), std::invalid_argument);
}

TEST_CASE("published reference row reproduces through the formula") {
  const double vp[] = {0.7742, 0.6720, 0.4283};
  const double tp[] = {0.7598, 0.7246, 0.7022};
  double r_vp = robustness(0.8132, vp);
  double r_tp = robustness(0.8132, tp);
  CHECK(std::abs(100.0 * r_vp - 78.12) <= 0.01);
  CHECK(std::abs(100.0 * r_tp - 86.63) <= 0.01);
  CHECK(std::abs(100.0 * (r_vp + r_tp) / 2.0 - 82.37) <= 0.01);
}

TEST_CASE("robustness is strictly monotone in level accuracy") {
  RngStream rng(2024);
  for (int i = 0; i < 100; ++i) {
    double clean = rng.uniform(0.05, 1.0);
    double x = rng.uniform(0.0, 1.0);
    double y = rng.uniform(0.0, 1.0);
    if (x == y) continue;
    double lo = std::min(x, y), hi = std::max(x, y);
    const double l[] = {lo}, h[] = {hi};
    CHECK(robustness(clean, h) > robustness(clean, l));
  }
}

TEST_CASE("contour scoring ranks the reference operating points") {
  const AccuracyPair pairs[] = {
      {0.8, 0.7},   // strong model, moderate drop
      {0.6, 0.5},   // mid model
      {0.4, 0.33},  // weak model, mild drop
  };
  ContourResult res = contour_check(pairs);
  REQUIRE(res.scores.size() == 3);
  CHECK(res.scores[0] == doctest::Approx(0.851163).epsilon(1e-5));
  CHECK(res.scores[1] == doctest::Approx(0.788235).epsilon(1e-5));
  CHECK(res.scores[2] == doctest::Approx(0.789349).epsilon(1e-5));

  REQUIRE(res.ranking.size() == 3);
  CHECK(res.ranking[0] == 0);
  CHECK(res.ranking[1] == 2);
  CHECK(res.ranking[2] == 1);

  REQUIRE(res.near_equal.size() == 1);
  CHECK(res.near_equal[0] == std::pair<std::size_t, std::size_t>{1, 2});
  CHECK(res.tolerance == 0.005);
  CHECK(std::abs(res.scores[1] - res.scores[2]) < 0.005);
}

TEST_CASE("aggregate folds cells into tier means and robustness") {
  std::vector<JudgmentSet> cells = {
      {PerturbationKind::DF, "easy", "human", 4, 5},
      {PerturbationKind::DF, "easy", "augmented", 2, 4},
      {PerturbationKind::OM, "easy", "", 3, 5},
      {PerturbationKind::DF, "mid", "", 1, 2},
      {PerturbationKind::OM, "mid", "", 1, 4},
      {PerturbationKind::DF, "hard", "", 1, 5},
      {PerturbationKind::OM, "hard", "", 0, 5},
      {PerturbationKind::CA, "easy", "", 3, 4},
      {PerturbationKind::CA, "mid", "", 1, 2},
      {PerturbationKind::CA, "hard", "", 1, 4},
  };
  std::vector<CleanSet> clean = {{"human", 3, 4}, {"augmented", 1, 2}};

  ScoreReport rep = aggregate(cells, clean);
  CHECK(rep.warnings.empty());
  CHECK(rep.clean_accuracy == doctest::Approx(0.625));  // mean of 0.75, 0.5
  CHECK(rep.clean_by_split.at("human") == std::pair<long long, long long>{3, 4});

  // splits average before kinds do: DF easy = (0.8 + 0.5) / 2
  CHECK(rep.cell_accuracy.at({PerturbationKind::DF, "easy"}) ==
        doctest::Approx(0.65));
  CHECK(rep.visual.level_accuracy.at("easy") == doctest::Approx(0.625));
  CHECK(rep.visual.level_accuracy.at("mid") == doctest::Approx(0.375));
  CHECK(rep.visual.level_accuracy.at("hard") == doctest::Approx(0.1));
  CHECK(rep.visual.drop.at("mid") == doctest::Approx(0.25));
  CHECK(rep.textual.level_accuracy.at("easy") == doctest::Approx(0.75));

  const double vp[] = {0.625, 0.375, 0.1};
  const double tp[] = {0.75, 0.5, 0.25};
  REQUIRE(rep.visual.robustness_score.has_value());
  REQUIRE(rep.textual.robustness_score.has_value());
  CHECK(*rep.visual.robustness_score == doctest::Approx(robustness(0.625, vp)));
  CHECK(*rep.textual.robustness_score == doctest::Approx(robustness(0.625, tp)));
  REQUIRE(rep.overall_robustness.has_value());
  CHECK(*rep.overall_robustness ==
        doctest::Approx((*rep.visual.robustness_score +
                         *rep.textual.robustness_score) / 2.0));
}

TEST_CASE("aggregate reports gaps instead of patching them") {
  std::vector<JudgmentSet> cells = {
      {PerturbationKind::DF, "easy", "", 4, 5},
      {PerturbationKind::DF, "mid", "", 2, 5},
      {PerturbationKind::DF, "hard", "", 1, 5},
      {PerturbationKind::CA, "easy", "", 3, 4},
      {PerturbationKind::CA, "hard", "", 1, 4},  // no mid cell
  };
  std::vector<CleanSet> clean = {{"", 4, 5}};
  ScoreReport rep = aggregate(cells, clean);

  bool missing_noted = false;
  for (const std::string& w : rep.warnings) {
    missing_noted |= w.find("CA missing at tier 'mid'") != std::string::npos;
  }
  CHECK(missing_noted);
  // textual track still scores, over the two tiers it has
  REQUIRE(rep.textual.robustness_score.has_value());
  CHECK(rep.textual.level_accuracy.count("mid") == 0);
}

TEST_CASE("aggregate flags single-track runs and empty cells") {
  std::vector<JudgmentSet> cells = {
      {PerturbationKind::DF, "easy", "", 4, 5},
      {PerturbationKind::DF, "mid", "", 2, 5},
      {PerturbationKind::DF, "hard", "", 1, 5},
      {PerturbationKind::OM, "easy", "", 0, 0},  // generated nothing
  };
  std::vector<CleanSet> clean = {{"", 4, 5}};
  ScoreReport rep = aggregate(cells, clean);

  bool empty_noted = false, single_track = false;
  for (const std::string& w : rep.warnings) {
    empty_noted |= w.find("empty cell OM/easy") != std::string::npos;
    single_track |= w.find("only one track") != std::string::npos;
  }
  CHECK(empty_noted);
  CHECK(single_track);
  CHECK(!rep.textual.robustness_score.has_value());
  REQUIRE(rep.overall_robustness.has_value());
  CHECK(*rep.overall_robustness == *rep.visual.robustness_score);
}

TEST_CASE("aggregate rejects malformed inputs") {
  std::vector<JudgmentSet> cells = {{PerturbationKind::DF, "easy", "", 6, 5}};
  std::vector<CleanSet> clean = {{"", 4, 5}};
  CHECK_THROWS_AS(aggregate(cells, clean), ConfigError);

  std::vector<JudgmentSet> fine = {{PerturbationKind::DF, "easy", "", 4, 5}};
  std::vector<CleanSet> none;
  CHECK_THROWS_AS(aggregate(fine, none), ConfigError);
}

TEST_CASE("zero clean accuracy disables robustness with a warning") {
  std::vector<JudgmentSet> cells = {{PerturbationKind::DF, "easy", "", 0, 5}};
  std::vector<CleanSet> clean = {{"", 0, 5}};
  ScoreReport rep = aggregate(cells, clean);
  CHECK(!rep.visual.robustness_score.has_value());
  CHECK(!rep.overall_robustness.has_value());
  bool noted = false;
  for (const std::string& w : rep.warnings) {
    noted |= w.find("clean accuracy is zero") != std::string::npos;
  }
  CHECK(noted);
}

TEST_CASE("csv rows line up with the header") {
  CHECK(ScoreReport::csv_header() ==
        "model,clean,vp_easy,vp_mid,vp_hard,r_vp,tp_easy,tp_mid,tp_hard,r_tp,r");

  std::vector<JudgmentSet> cells = {
      {PerturbationKind::DF, "easy", "", 4, 5},
      {PerturbationKind::DF, "mid", "", 3, 5},
      {PerturbationKind::DF, "hard", "", 1, 5},
      {PerturbationKind::CA, "easy", "", 4, 5},
      {PerturbationKind::CA, "mid", "", 3, 5},
      {PerturbationKind::CA, "hard", "", 2, 5},
  };
  std::vector<CleanSet> clean = {{"", 9, 10}};
  ScoreReport rep = aggregate(cells, clean);

  std::vector<std::string> fields = split_fields(rep.to_csv_row("demo-model"));
  REQUIRE(fields.size() == 11);
  CHECK(fields[0] == "demo-model");
  CHECK(fields[1] == "90.00");
  CHECK(fields[2] == "80.00");
  CHECK(fields[3] == "60.00");
  CHECK(fields[4] == "20.00");
  CHECK(fields[7] == "60.00");
  CHECK(std::stod(fields[5]) ==
        doctest::Approx(100.0 * *rep.visual.robustness_score).epsilon(1e-4));
  CHECK(std::stod(fields[10]) ==
        doctest::Approx(100.0 * *rep.overall_robustness).epsilon(1e-4));
}

TEST_CASE("json report parses back with the same numbers") {
  std::vector<JudgmentSet> cells = {
      {PerturbationKind::DF, "easy", "human", 4, 5},
      {PerturbationKind::DF, "mid", "human", 3, 5},
      {PerturbationKind::DF, "hard", "human", 1, 5},
      {PerturbationKind::WM, "easy", "human", 4, 5},
      {PerturbationKind::WM, "mid", "human", 3, 5},
      {PerturbationKind::WM, "hard", "human", 2, 5},
  };
  std::vector<CleanSet> clean = {{"human", 9, 10}};
  ScoreReport rep = aggregate(cells, clean);

  nlohmann::json doc = nlohmann::json::parse(rep.to_json_text());
  CHECK(doc["clean"]["accuracy"].get<double>() == doctest::Approx(0.9));
  CHECK(doc["clean"]["by_split"]["human"]["correct"].get<long long>() == 9);
  CHECK(doc["cells"]["DF"]["easy"].get<double>() == doctest::Approx(0.8));
  CHECK(doc["tracks"]["visual"]["robustness"].get<double>() ==
        doctest::Approx(*rep.visual.robustness_score));
  CHECK(doc["tracks"]["textual"]["levels"]["hard"].get<double>() ==
        doctest::Approx(0.4));
  CHECK(doc["robustness"].get<double>() ==
        doctest::Approx(*rep.overall_robustness));
  CHECK(doc["warnings"].is_array());
}
