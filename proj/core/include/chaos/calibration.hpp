#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chaos/kind.hpp"
#include "chaos/schedule.hpp"

namespace chaos {

// Human-study response matrix: per kind, the number of participants who
// answered correctly at each severity level 1..10.
struct ResponseMatrix {
  int total_participants = 0;
  std::map<PerturbationKind, std::array<int, kMaxLevel>> counts;

  static ResponseMatrix load_csv(const std::filesystem::path& file);
  void save_csv(const std::filesystem::path& file) const;

  // Cells must sit in [0, total]; total must be positive.
  void validate() const;
};

// Threshold for the cumulative "easy" rule as a function of participant
// count. The default is ceil(0.9 * total).
using EasyThreshold = std::function<int(int total)>;

struct CalibrationOutcome {
  std::map<PerturbationKind, NamedLevels> triples;
  std::vector<std::string> warnings;  // ordering violations and the like
};

// Derives (easy, mid, hard) per kind:
//   easy = highest level L whose cumulative correct count over levels
//          10..L reaches the threshold (level 1 if never reached, with a
//          warning);
//   mid  = level with the maximum count, ties broken toward the more
//          severe level;
//   hard = highest level with a nonzero count.
// An all-zero row is uninterpretable at every level and raises ConfigError.
CalibrationOutcome calibrate(const ResponseMatrix& matrix,
                             const EasyThreshold& threshold = {});

// Long-form CSV (kind,level,count,tier) for plotting the matrix with the
// derived tiers marked.
std::string heatmap_csv(const ResponseMatrix& matrix,
                        const CalibrationOutcome& outcome);

}  // namespace chaos
