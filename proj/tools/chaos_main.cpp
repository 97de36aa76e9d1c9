// chaos: generate chart perturbations, calibrate severity tiers from human
// study matrices, and score model predictions.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chaos/calibration.hpp"
#include "chaos/errors.hpp"
#include "chaos/image_io.hpp"
#include "chaos/kind.hpp"
#include "chaos/lexicon.hpp"
#include "chaos/metrics.hpp"
#include "chaos/pipeline.hpp"
#include "chaos/rng.hpp"
#include "chaos/schedule.hpp"
#include "chaos/version.hpp"
#include "chaos/visual.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

chaos::SeveritySchedule load_schedule(const std::string& path) {
  if (path.empty()) return chaos::SeveritySchedule::defaults();
  return chaos::SeveritySchedule::load(path);
}

chaos::PerturbationKind parse_kind(const std::string& code) {
  auto kind = chaos::kind_from_code(code);
  if (!kind) throw UsageError("unknown perturbation kind '" + code + "'");
  return *kind;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    std::size_t comma = csv.find(',', begin);
    if (comma == std::string::npos) comma = csv.size();
    std::string item = csv.substr(begin, comma - begin);
    if (!item.empty()) out.push_back(item);
    begin = comma + 1;
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw chaos::IoError("cannot write " + path);
  out << content;
  if (!out) throw chaos::IoError("write failed for " + path);
}

// ----- perturb -----

struct PerturbArgs {
  std::string image, out, schedule, kind_code, level_name;
  int level = -1;
  std::uint64_t seed = 0;
};

int cmd_perturb(const PerturbArgs& args) {
  chaos::PerturbationKind kind = parse_kind(args.kind_code);
  if (chaos::is_textual(kind)) {
    throw UsageError("perturb handles visual kinds; use 'generate' for " +
                     args.kind_code);
  }
  chaos::SeveritySchedule schedule = load_schedule(args.schedule);
  int level = args.level;
  if (!args.level_name.empty()) {
    if (level >= 0) throw UsageError("give either --level or --level-name");
    level = schedule.named_level(kind, args.level_name);
  }
  if (level < 0) throw UsageError("one of --level or --level-name is required");

  chaos::PerturbationSpec spec = chaos::resolve_spec(kind, level, schedule);
  chaos::Raster img = chaos::read_image(args.image);
  chaos::RngStream rng(args.seed);
  chaos::Raster out = chaos::apply_visual(img, spec, rng);
  chaos::write_png(out, args.out);

  json doc;
  doc["kind"] = args.kind_code;
  doc["level_index"] = level;
  if (!args.level_name.empty()) doc["level_name"] = args.level_name;
  doc["seed"] = args.seed;
  doc["params"] = spec.params;
  doc["output"] = args.out;
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

// ----- generate -----

struct GenerateArgs {
  std::string dataset, layout = "chartqa", out, schedule, lexicon;
  std::string kinds_csv, tiers_csv, gold_out;
  std::uint64_t seed = 0;
  int workers = 0;
};

int cmd_generate(const GenerateArgs& args) {
  chaos::DatasetLayout layout;
  if (args.layout == "chartqa") {
    layout = chaos::DatasetLayout::chartqa;
  } else if (args.layout == "chart2text") {
    layout = chaos::DatasetLayout::chart2text;
  } else {
    throw UsageError("unknown layout '" + args.layout +
                     "' (expected chartqa or chart2text)");
  }
  chaos::SeveritySchedule schedule = load_schedule(args.schedule);

  chaos::GenerateOptions options;
  options.base_seed = args.seed;
  options.workers = args.workers;
  for (const std::string& code : split_list(args.kinds_csv)) {
    options.kinds.push_back(parse_kind(code));
  }
  options.tiers = split_list(args.tiers_csv);
  std::optional<chaos::Lexicon> lexicon;
  if (!args.lexicon.empty()) {
    lexicon = chaos::Lexicon::load(args.lexicon);
    options.lexicon = &*lexicon;
  }

  chaos::IngestResult dataset = chaos::ingest(args.dataset, layout);
  for (const std::string& err : dataset.errors) {
    std::cerr << "ingest: " << err << "\n";
  }
  chaos::Manifest manifest =
      chaos::generate(dataset.records, schedule, options, args.out);
  for (const std::string& err : manifest.errors) {
    std::cerr << "generate: " << err << "\n";
  }

  if (!args.gold_out.empty()) {
    std::string lines;
    for (const chaos::DatasetRecord& rec : dataset.records) {
      json obj;
      obj["id"] = rec.id;
      obj["gold"] = rec.gold;
      obj["split"] = rec.split;
      lines += obj.dump() + "\n";
    }
    write_file(args.gold_out, lines);
  }

  json doc;
  doc["records"] = dataset.records.size();
  doc["entries"] = manifest.entries.size();
  doc["ingest_errors"] = dataset.errors.size();
  doc["generate_errors"] = manifest.errors.size();
  doc["manifest"] = (std::filesystem::path(args.out) / "manifest.json").string();
  std::cout << doc.dump(2) << "\n";
  return manifest.errors.empty() && dataset.errors.empty() ? kExitOk
                                                           : kExitRuntime;
}

// ----- calibrate -----

struct CalibrateArgs {
  std::string matrix, out;
  bool as_json = false;
};

int cmd_calibrate(const CalibrateArgs& args) {
  chaos::ResponseMatrix matrix = chaos::ResponseMatrix::load_csv(args.matrix);
  chaos::CalibrationOutcome outcome = chaos::calibrate(matrix);
  for (const std::string& w : outcome.warnings) {
    std::cerr << "calibrate: " << w << "\n";
  }
  if (!args.out.empty()) {
    write_file(args.out, chaos::heatmap_csv(matrix, outcome));
  }
  if (args.as_json) {
    json doc;
    for (const auto& [kind, levels] : outcome.triples) {
      json entry;
      entry["easy"] = levels.easy;
      entry["mid"] = levels.mid;
      entry["hard"] = levels.hard;
      doc[std::string(chaos::kind_code(kind))] = entry;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& [kind, levels] : outcome.triples) {
      std::cout << chaos::kind_code(kind) << " easy=" << levels.easy
                << " mid=" << levels.mid << " hard=" << levels.hard << "\n";
    }
  }
  return kExitOk;
}

// ----- score -----

struct ScoreArgs {
  std::string manifest, predictions, clean, gold, out, csv, model = "run";
};

int cmd_score(const ScoreArgs& args) {
  chaos::Manifest manifest = chaos::Manifest::load(args.manifest);
  std::vector<chaos::GoldRecord> gold = chaos::load_gold_jsonl(args.gold);
  chaos::ScoreReport report =
      chaos::score_run(manifest, args.predictions, args.clean, gold);
  for (const std::string& w : report.warnings) {
    std::cerr << "score: " << w << "\n";
  }
  std::string text = report.to_json_text();
  if (!args.out.empty()) write_file(args.out, text);
  if (!args.csv.empty()) {
    write_file(args.csv, chaos::ScoreReport::csv_header() + "\n" +
                             report.to_csv_row(args.model) + "\n");
  }
  std::cout << text;
  return kExitOk;
}

// ----- report -----

struct ReportArgs {
  std::string accuracies, out, series;
};

double percent_field(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw chaos::ConfigError("report: " + ctx + " lacks numeric '" + key + "'");
  }
  double v = obj[key].get<double>();
  if (v < 0.0 || v > 100.0) {
    throw chaos::ConfigError("report: " + ctx + " '" + key +
                             "' outside 0..100 (values are percentages)");
  }
  return v;
}

int cmd_report(const ReportArgs& args) {
  json doc;
  try {
    doc = json::parse(std::ifstream(args.accuracies));
  } catch (const json::exception& e) {
    throw chaos::ConfigError("report: " + args.accuracies + ": " + e.what());
  }
  if (!doc.contains("models") || !doc["models"].is_array()) {
    throw chaos::ConfigError("report: expected a top-level 'models' array");
  }
  const std::vector<std::string> tiers = {"easy", "mid", "hard"};
  std::string csv = chaos::ScoreReport::csv_header() + "\n";
  std::string series = "model,track,tier,accuracy,drop\n";
  char buf[64];
  for (const json& model : doc["models"]) {
    std::string name = model.value("name", std::string("model"));
    double clean = percent_field(model, "clean", name) / 100.0;
    chaos::ScoreReport rep;
    rep.clean_accuracy = clean;
    struct Track {
      const char* key;
      chaos::TrackSummary* summary;
    };
    Track tracks[2] = {{"vp", &rep.visual}, {"tp", &rep.textual}};
    for (Track& track : tracks) {
      if (!model.contains(track.key)) continue;
      const json& obj = model[track.key];
      std::vector<double> levels;
      for (const std::string& tier : tiers) {
        double acc =
            percent_field(obj, tier.c_str(), name + "." + track.key) / 100.0;
        track.summary->level_accuracy[tier] = acc;
        track.summary->drop[tier] = clean - acc;
        levels.push_back(acc);
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.2f,%.2f\n", name.c_str(),
                      track.key, tier.c_str(), acc * 100.0,
                      (clean - acc) * 100.0);
        series += buf;
      }
      track.summary->robustness_score = chaos::robustness(clean, levels);
    }
    double sum = 0.0;
    int n = 0;
    for (Track& track : tracks) {
      if (track.summary->robustness_score) {
        sum += *track.summary->robustness_score;
        ++n;
      }
    }
    if (n > 0) rep.overall_robustness = sum / n;
    csv += rep.to_csv_row(name) + "\n";
  }
  if (!args.out.empty()) write_file(args.out, csv);
  if (!args.series.empty()) write_file(args.series, series);
  std::cout << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHAOS chart perturbation toolkit"};
  app.set_version_flag("--version", chaos::kVersion);
  app.require_subcommand(1);

  PerturbArgs perturb;
  CLI::App* p = app.add_subcommand("perturb", "perturb a single chart image");
  p->add_option("--image", perturb.image, "input PNG or JPEG")->required();
  p->add_option("--out", perturb.out, "output PNG path")->required();
  p->add_option("--kind", perturb.kind_code, "perturbation kind code")->required();
  p->add_option("--level", perturb.level, "severity level 0..10");
  p->add_option("--level-name", perturb.level_name, "named tier: easy|mid|hard");
  p->add_option("--seed", perturb.seed, "random seed");
  p->add_option("--schedule", perturb.schedule, "severity schedule JSON")
      ->envname("CHAOS_SCHEDULE");

  GenerateArgs generate;
  CLI::App* g = app.add_subcommand("generate", "run a full perturbation sweep");
  g->add_option("--dataset", generate.dataset, "dataset root")->required();
  g->add_option("--layout", generate.layout, "chartqa|chart2text");
  g->add_option("--out", generate.out, "output root")->required();
  g->add_option("--kinds", generate.kinds_csv, "comma separated kind codes");
  g->add_option("--tiers", generate.tiers_csv, "comma separated tier names");
  g->add_option("--seed", generate.seed, "base seed");
  g->add_option("--workers", generate.workers, "worker threads (0 = auto)");
  g->add_option("--schedule", generate.schedule, "severity schedule JSON")
      ->envname("CHAOS_SCHEDULE");
  g->add_option("--lexicon", generate.lexicon, "word substitution lexicon");
  g->add_option("--emit-gold", generate.gold_out, "write gold JSONL here");

  CalibrateArgs calibrate;
  CLI::App* c = app.add_subcommand("calibrate",
                                   "derive easy/mid/hard from a study matrix");
  c->add_option("--matrix", calibrate.matrix, "response matrix CSV")->required();
  c->add_option("--out", calibrate.out, "write heatmap CSV here");
  c->add_flag("--json", calibrate.as_json, "emit JSON instead of lines");

  ScoreArgs score;
  CLI::App* s = app.add_subcommand("score", "score model predictions");
  s->add_option("--manifest", score.manifest, "run manifest")->required();
  s->add_option("--predictions", score.predictions,
                "predictions dir or JSONL")->required();
  s->add_option("--clean", score.clean, "clean predictions JSONL")->required();
  s->add_option("--gold", score.gold, "gold answers JSONL")->required();
  s->add_option("--out", score.out, "write report JSON here");
  s->add_option("--csv", score.csv, "write summary CSV here");
  s->add_option("--model", score.model, "model name for the CSV row");

  ReportArgs report;
  CLI::App* r = app.add_subcommand("report", "render a leaderboard CSV");
  r->add_option("--accuracies", report.accuracies,
                "model accuracies JSON")->required();
  r->add_option("--out", report.out, "write leaderboard CSV here");
  r->add_option("--series", report.series, "write per-tier series CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (p->parsed()) return cmd_perturb(perturb);
    if (g->parsed()) return cmd_generate(generate);
    if (c->parsed()) return cmd_calibrate(calibrate);
    if (s->parsed()) return cmd_score(score);
    if (r->parsed()) return cmd_report(report);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
