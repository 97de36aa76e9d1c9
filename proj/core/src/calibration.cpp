#include "chaos/calibration.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "chaos/errors.hpp"

namespace chaos {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_count(const std::string& field, const std::string& context) {
  std::string t = trimmed(field);
  if (t.empty()) throw ConfigError("response matrix: empty cell in " + context);
  std::size_t used = 0;
  int v;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("response matrix: bad integer '" + t + "' in " + context);
  }
  if (used != t.size()) {
    throw ConfigError("response matrix: bad integer '" + t + "' in " + context);
  }
  return v;
}

}  // namespace

ResponseMatrix ResponseMatrix::load_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("response matrix: cannot open " + file.string());
  ResponseMatrix m;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields = split_csv_line(t);
    if (!header_seen) {
      // header: kind,l1,...,l10,total
      if (fields.size() != kMaxLevel + 2 || trimmed(fields[0]) != "kind") {
        throw ConfigError("response matrix: bad header in " + file.string());
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kMaxLevel + 2) {
      throw ConfigError("response matrix: wrong column count in row '" + t + "'");
    }
    std::string code = trimmed(fields[0]);
    auto kind = kind_from_code(code);
    if (!kind) throw ConfigError("response matrix: unknown kind '" + code + "'");
    if (m.counts.count(*kind)) {
      throw ConfigError("response matrix: duplicate row for " + code);
    }
    std::array<int, kMaxLevel> row;
    for (int i = 0; i < kMaxLevel; ++i) {
      row[i] = parse_count(fields[i + 1], code + " level " + std::to_string(i + 1));
    }
    int total = parse_count(fields[kMaxLevel + 1], code + " total");
    if (m.total_participants == 0) {
      m.total_participants = total;
    } else if (m.total_participants != total) {
      throw ConfigError("response matrix: inconsistent participant totals");
    }
    m.counts[*kind] = row;
  }
  if (!header_seen || m.counts.empty()) {
    throw ConfigError("response matrix: no data rows in " + file.string());
  }
  m.validate();
  return m;
}

void ResponseMatrix::save_csv(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("response matrix: cannot write " + file.string());
  out << "kind";
  for (int i = 1; i <= kMaxLevel; ++i) out << ",l" << i;
  out << ",total\n";
  for (const auto& [kind, row] : counts) {
    out << kind_code(kind);
    for (int v : row) out << ',' << v;
    out << ',' << total_participants << '\n';
  }
  if (!out) throw IoError("response matrix: write failed for " + file.string());
}

void ResponseMatrix::validate() const {
  if (total_participants <= 0) {
    throw ConfigError("response matrix: participant total must be positive");
  }
  for (const auto& [kind, row] : counts) {
    for (int i = 0; i < kMaxLevel; ++i) {
      if (row[i] < 0 || row[i] > total_participants) {
        throw ConfigError("response matrix: " + std::string(kind_code(kind)) +
                          " level " + std::to_string(i + 1) + " count " +
                          std::to_string(row[i]) + " outside 0..total");
      }
    }
  }
}

CalibrationOutcome calibrate(const ResponseMatrix& matrix,
                             const EasyThreshold& threshold) {
  matrix.validate();
  CalibrationOutcome outcome;
  int needed = threshold
                   ? threshold(matrix.total_participants)
                   : static_cast<int>(
                         std::ceil(0.9 * matrix.total_participants));

  for (const auto& [kind, row] : matrix.counts) {
    const std::string code(kind_code(kind));
    bool all_zero = true;
    for (int v : row) all_zero = all_zero && v == 0;
    if (all_zero) {
      throw ConfigError("calibration: " + code +
                        " row is all zero, uninterpretable at every level");
    }

    // easy: highest level whose tail sum from level 10 down reaches the
    // threshold; falls back to level 1 when it never does
    int easy = 0;
    int tail = 0;
    for (int level = kMaxLevel; level >= 1; --level) {
      tail += row[level - 1];
      if (tail >= needed) {
        easy = level;
        break;
      }
    }
    if (easy == 0) {
      easy = 1;
      outcome.warnings.push_back(
          code + ": cumulative threshold " + std::to_string(needed) +
          " never reached, easy defaulted to level 1");
    }

    // mid: modal level, ties resolved toward the more severe level
    int mid = 1;
    int best = -1;
    for (int level = 1; level <= kMaxLevel; ++level) {
      if (row[level - 1] >= best) {
        best = row[level - 1];
        mid = level;
      }
    }

    // hard: most severe level anyone still answered
    int hard = 1;
    for (int level = kMaxLevel; level >= 1; --level) {
      if (row[level - 1] > 0) {
        hard = level;
        break;
      }
    }

    if (!(easy <= mid && mid <= hard)) {
      outcome.warnings.push_back(
          code + ": derived levels violate easy <= mid <= hard (easy=" +
          std::to_string(easy) + " mid=" + std::to_string(mid) +
          " hard=" + std::to_string(hard) + ")");
    }
    outcome.triples[kind] = NamedLevels{easy, mid, hard};
  }
  return outcome;
}

std::string heatmap_csv(const ResponseMatrix& matrix,
                        const CalibrationOutcome& outcome) {
  std::ostringstream out;
  out << "kind,level,count,tier\n";
  for (const auto& [kind, row] : matrix.counts) {
    auto it = outcome.triples.find(kind);
    for (int level = 1; level <= kMaxLevel; ++level) {
      std::string tier;
      if (it != outcome.triples.end()) {
        if (level == it->second.easy) tier = "easy";
        // mid/hard override when levels coincide: report the harder name
        if (level == it->second.mid) tier = tier.empty() ? "mid" : tier + "+mid";
        if (level == it->second.hard) tier = tier.empty() ? "hard" : tier + "+hard";
      }
      out << kind_code(kind) << ',' << level << ',' << row[level - 1] << ','
          << tier << '\n';
    }
  }
  return out.str();
}

}  // namespace chaos
