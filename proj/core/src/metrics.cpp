#include "chaos/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "chaos/errors.hpp"

namespace chaos {

namespace {

bool digit(char c) { return c >= '0' && c <= '9'; }

// Strip commas only when they form exact thousands grouping
// (e.g. 1,234,567.8); anything else keeps its commas and will fail the
// numeric parse instead of being silently reinterpreted.
std::string strip_thousands(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t first = i;
  while (i < s.size() && digit(s[i])) ++i;
  std::size_t lead = i - first;
  if (lead < 1 || lead > 3) return s;
  bool any_group = false;
  while (i < s.size() && s[i] == ',') {
    if (i + 3 >= s.size() || !digit(s[i + 1]) || !digit(s[i + 2]) ||
        !digit(s[i + 3])) {
      return s;
    }
    i += 4;
    any_group = true;
  }
  if (!any_group) return s;
  // optional fraction / exponent tail, no further commas allowed
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && digit(s[i])) ++i;
  }
  if (i != s.size()) return s;
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != ',') out.push_back(c);
  }
  return out;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string s(raw.substr(b, e - b));
  if (!s.empty() && s.back() == '%') {
    s.pop_back();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
      s.pop_back();
    }
  }
  s = strip_thousands(s);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<double> parse_numeric(std::string_view normalized) {
  if (normalized.empty()) return std::nullopt;
  std::string buf(normalized);
  const char* begin = buf.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end != begin + buf.size()) return std::nullopt;
  if (errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

Judgment relaxed_match(std::string_view gold, std::string_view prediction) {
  Judgment j;
  j.gold = normalize_answer(gold);
  j.prediction = normalize_answer(prediction);
  auto g = parse_numeric(j.gold);
  auto p = parse_numeric(j.prediction);
  if (g && p) {
    j.numeric = true;
    if (*g == 0.0) {
      j.correct = *p == 0.0;
    } else {
      j.correct = std::abs(*p - *g) <= 0.05 * std::abs(*g);
    }
  } else {
    j.correct = !j.gold.empty() && j.gold == j.prediction;
  }
  return j;
}

double robustness(double clean, std::span<const double> levels) {
  if (!(clean > 0.0) || clean > 1.0) {
    throw std::invalid_argument(
        "robustness: clean accuracy must be in (0,1]");
  }
  if (levels.empty()) {
    throw std::invalid_argument("robustness: no level accuracies given");
  }
  double sum = 0.0;
  for (double a : levels) {
    if (a < 0.0 || a > 1.0) {
      throw std::invalid_argument("robustness: accuracy outside [0,1]");
    }
    double ratio = a / clean;
    sum += 1.0 - (1.0 - a) / (ratio * ratio + 1.0 / clean);
  }
  return sum / static_cast<double>(levels.size());
}

ContourResult contour_check(std::span<const AccuracyPair> pairs,
                            double near_tol) {
  ContourResult res;
  res.tolerance = near_tol;
  res.scores.reserve(pairs.size());
  for (const AccuracyPair& p : pairs) {
    double level[1] = {p.level};
    res.scores.push_back(robustness(p.clean, level));
  }
  res.ranking.resize(res.scores.size());
  std::iota(res.ranking.begin(), res.ranking.end(), std::size_t{0});
  std::stable_sort(res.ranking.begin(), res.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return res.scores[a] > res.scores[b];
                   });
  for (std::size_t i = 0; i < res.scores.size(); ++i) {
    for (std::size_t j = i + 1; j < res.scores.size(); ++j) {
      if (std::abs(res.scores[i] - res.scores[j]) <= near_tol) {
        res.near_equal.emplace_back(i, j);
      }
    }
  }
  return res;
}

namespace {

struct Cell {
  long long correct = 0;
  long long total = 0;
};

double cell_accuracy_mean(const std::map<std::string, Cell>& by_split) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [split, cell] : by_split) {
    if (cell.total <= 0) continue;
    sum += static_cast<double>(cell.correct) / static_cast<double>(cell.total);
    ++n;
  }
  return n > 0 ? sum / n : -1.0;
}

}  // namespace

ScoreReport aggregate(std::span<const JudgmentSet> cells,
                      std::span<const CleanSet> clean,
                      std::span<const std::string> tier_order) {
  ScoreReport report;

  // clean accuracy: splits averaged unweighted, counts kept exact
  std::map<std::string, Cell> clean_cells;
  for (const CleanSet& c : clean) {
    if (c.total < 0 || c.correct < 0 || c.correct > c.total) {
      throw ConfigError("aggregate: malformed clean counts");
    }
    Cell& cell = clean_cells[c.split];
    cell.correct += c.correct;
    cell.total += c.total;
  }
  for (const auto& [split, cell] : clean_cells) {
    report.clean_by_split[split] = {cell.correct, cell.total};
  }
  double clean_acc = cell_accuracy_mean(clean_cells);
  if (clean_acc < 0.0) {
    throw ConfigError("aggregate: no clean judgments supplied");
  }
  report.clean_accuracy = clean_acc;

  // (kind, tier) -> split -> counts
  std::map<std::pair<PerturbationKind, std::string>, std::map<std::string, Cell>>
      grouped;
  std::set<PerturbationKind> vp_seen, tp_seen;
  for (const JudgmentSet& s : cells) {
    if (s.total < 0 || s.correct < 0 || s.correct > s.total) {
      throw ConfigError("aggregate: malformed counts for " +
                        std::string(kind_code(s.kind)) + "/" + s.level);
    }
    Cell& cell = grouped[{s.kind, s.level}][s.split];
    cell.correct += s.correct;
    cell.total += s.total;
    (is_visual(s.kind) ? vp_seen : tp_seen).insert(s.kind);
  }
  for (const auto& [key, by_split] : grouped) {
    double acc = cell_accuracy_mean(by_split);
    if (acc < 0.0) {
      report.warnings.push_back("empty cell " +
                                std::string(kind_code(key.first)) + "/" +
                                key.second + " skipped");
      continue;
    }
    report.cell_accuracy[key] = acc;
  }

  auto fill_track = [&](TrackSummary& track, const std::set<PerturbationKind>& seen) {
    std::vector<double> level_values;
    for (const std::string& tier : tier_order) {
      double sum = 0.0;
      int n = 0;
      for (PerturbationKind kind : seen) {
        auto it = report.cell_accuracy.find({kind, tier});
        if (it == report.cell_accuracy.end()) {
          report.warnings.push_back(std::string(kind_code(kind)) +
                                    " missing at tier '" + tier +
                                    "', excluded from that tier's mean");
          continue;
        }
        sum += it->second;
        ++n;
      }
      if (n == 0) {
        if (!seen.empty()) {
          report.warnings.push_back("tier '" + tier +
                                    "' has no cells, excluded from robustness");
        }
        continue;
      }
      double acc = sum / n;
      track.level_accuracy[tier] = acc;
      track.drop[tier] = report.clean_accuracy - acc;
      level_values.push_back(acc);
    }
    if (!level_values.empty()) {
      if (report.clean_accuracy > 0.0) {
        track.robustness_score = robustness(report.clean_accuracy, level_values);
      } else {
        report.warnings.push_back(
            "clean accuracy is zero, robustness undefined");
      }
    }
  };
  fill_track(report.visual, vp_seen);
  fill_track(report.textual, tp_seen);

  double sum = 0.0;
  int n = 0;
  if (report.visual.robustness_score) {
    sum += *report.visual.robustness_score;
    ++n;
  }
  if (report.textual.robustness_score) {
    sum += *report.textual.robustness_score;
    ++n;
  }
  if (n == 1) {
    report.warnings.push_back(
        "only one track present, overall robustness covers it alone");
  }
  if (n > 0) report.overall_robustness = sum / n;
  return report;
}

ScoreReport aggregate(std::span<const JudgmentSet> cells,
                      std::span<const CleanSet> clean) {
  return aggregate(cells, clean, kDefaultTierOrder);
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
  return buf;
}

nlohmann::json track_json(const TrackSummary& t) {
  nlohmann::json j;
  j["levels"] = t.level_accuracy;
  j["drops"] = t.drop;
  if (t.robustness_score) {
    j["robustness"] = *t.robustness_score;
  } else {
    j["robustness"] = nullptr;
  }
  return j;
}

}  // namespace

std::string ScoreReport::to_json_text() const {
  nlohmann::json j;
  j["clean"]["accuracy"] = clean_accuracy;
  for (const auto& [split, counts] : clean_by_split) {
    j["clean"]["by_split"][split.empty() ? "default" : split] = {
        {"correct", counts.first}, {"total", counts.second}};
  }
  for (const auto& [key, acc] : cell_accuracy) {
    j["cells"][std::string(kind_code(key.first))][key.second] = acc;
  }
  j["tracks"]["visual"] = track_json(visual);
  j["tracks"]["textual"] = track_json(textual);
  if (overall_robustness) {
    j["robustness"] = *overall_robustness;
  } else {
    j["robustness"] = nullptr;
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string ScoreReport::csv_header() {
  return "model,clean,vp_easy,vp_mid,vp_hard,r_vp,tp_easy,tp_mid,tp_hard,"
         "r_tp,r";
}

std::string ScoreReport::to_csv_row(std::string_view model) const {
  auto tier = [](const TrackSummary& t, const char* name) -> std::string {
    auto it = t.level_accuracy.find(name);
    return it == t.level_accuracy.end() ? "" : pct(it->second);
  };
  auto rob = [](const std::optional<double>& r) -> std::string {
    return r ? pct(*r) : "";
  };
  std::string out(model);
  out += ',' + pct(clean_accuracy);
  out += ',' + tier(visual, "easy") + ',' + tier(visual, "mid") + ',' +
         tier(visual, "hard") + ',' + rob(visual.robustness_score);
  out += ',' + tier(textual, "easy") + ',' + tier(textual, "mid") + ',' +
         tier(textual, "hard") + ',' + rob(textual.robustness_score);
  out += ',' + rob(overall_robustness);
  return out;
}

}  // namespace chaos
