#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chaos/kind.hpp"

namespace chaos {

// ----- relaxed answer matching -----

// Canonicalization applied to both sides before comparison: trim ASCII
// whitespace, drop one trailing '%', remove commas when they form exact
// thousands grouping, lowercase ASCII letters.
std::string normalize_answer(std::string_view raw);

// Full-string numeric parse of a normalized answer; nullopt when the text
// is not a plain finite number.
std::optional<double> parse_numeric(std::string_view normalized);

struct Judgment {
  bool correct = false;
  bool numeric = false;  // both sides parsed as numbers
  std::string gold;      // normalized
  std::string prediction;
};

// Numeric pairs match within 5% relative tolerance (inclusive, and a gold
// of zero only accepts an exact zero); everything else is normalized
// string equality.
Judgment relaxed_match(std::string_view gold, std::string_view prediction);

// ----- robustness -----

// Accuracy-drop score for one track. Accuracies are fractions on [0,1];
// clean must be positive. For each perturbed accuracy A the per-level term
// is 1 - (1 - A) / ((A / clean)^2 + 1 / clean), and the score is the mean
// over levels. Empty level list is an error.
double robustness(double clean, std::span<const double> levels);

struct AccuracyPair {
  double clean = 0.0;
  double level = 0.0;
};

struct ContourResult {
  std::vector<double> scores;          // one per input pair
  std::vector<std::size_t> ranking;    // indices sorted by descending score
  std::vector<std::pair<std::size_t, std::size_t>> near_equal;
  double tolerance = 0.0;
};

// Scores each (clean, level-accuracy) pair and reports the ranking plus
// any pairs whose scores sit within `near_tol` of each other.
ContourResult contour_check(std::span<const AccuracyPair> pairs,
                            double near_tol = 0.005);

// ----- aggregation -----

// Tallied cell for one (kind, tier, split) slice of a run.
struct JudgmentSet {
  PerturbationKind kind = PerturbationKind::DF;
  std::string level;  // tier name, e.g. "easy"
  std::string split;  // dataset split, may be empty
  long long correct = 0;
  long long total = 0;
};

struct CleanSet {
  std::string split;
  long long correct = 0;
  long long total = 0;
};

struct TrackSummary {
  std::map<std::string, double> level_accuracy;  // tier -> mean over kinds
  std::map<std::string, double> drop;            // clean - tier accuracy
  std::optional<double> robustness_score;
};

struct ScoreReport {
  double clean_accuracy = 0.0;
  std::map<std::string, std::pair<long long, long long>> clean_by_split;
  // (kind, tier) -> accuracy, averaged over splits with exact counts kept
  // until this final division.
  std::map<std::pair<PerturbationKind, std::string>, double> cell_accuracy;
  TrackSummary visual;
  TrackSummary textual;
  std::optional<double> overall_robustness;
  std::vector<std::string> warnings;

  std::string to_json_text() const;
  static std::string csv_header();
  std::string to_csv_row(std::string_view model) const;
};

inline const std::vector<std::string> kDefaultTierOrder = {"easy", "mid",
                                                           "hard"};

// Folds per-cell counts into tier accuracies (unweighted mean over the
// kinds present at each tier, splits averaged first), computes both track
// robustness scores and their mean. Gaps are reported in warnings, never
// silently patched.
ScoreReport aggregate(std::span<const JudgmentSet> cells,
                      std::span<const CleanSet> clean,
                      std::span<const std::string> tier_order);
ScoreReport aggregate(std::span<const JudgmentSet> cells,
                      std::span<const CleanSet> clean);

}  // namespace chaos
