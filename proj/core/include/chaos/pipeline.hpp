#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chaos/kind.hpp"
#include "chaos/lexicon.hpp"
#include "chaos/metrics.hpp"
#include "chaos/schedule.hpp"

namespace chaos {

enum class DatasetLayout { chartqa, chart2text };

// One benchmark sample after ingest, layout differences normalized away.
struct DatasetRecord {
  std::string id;  // unique within the run, filesystem-safe
  std::filesystem::path image;
  std::string query;
  std::string gold;
  std::string split;
};

struct IngestResult {
  std::vector<DatasetRecord> records;
  std::vector<std::string> errors;  // per-record problems, non-fatal
};

// chartqa: root with test_human.json / test_augmented.json annotation
// arrays ({imgname, query, label}) plus png/ images. chart2text: root with
// pew/ and statista/, imgs/ plus captions/<stem>.txt. Missing layout
// essentials raise IoError; individual bad records land in errors.
IngestResult ingest(const std::filesystem::path& root, DatasetLayout layout);

// ----- generation runs -----

struct ManifestEntry {
  std::string id;
  PerturbationKind kind = PerturbationKind::DF;
  std::string level_name;
  int level_index = 0;
  ParamMap params;
  std::uint64_t derived_seed = 0;
  std::string output_path;      // relative to the run root, '/' separators
  std::string input_checksum;   // fnv1a64 hex of decoded input samples
  std::string output_checksum;  // fnv1a64 hex of produced samples
};

// Written atomically as manifest.json at the run root. Deliberately free
// of timestamps and absolute paths so identical runs are byte-identical.
struct Manifest {
  std::string schema_version = "1";
  std::string generator_version;
  std::uint64_t base_seed = 0;
  std::string schedule_checksum;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> errors;

  std::string to_json_text() const;
  static Manifest from_json_text(const std::string& text);
  void save(const std::filesystem::path& file) const;
  static Manifest load(const std::filesystem::path& file);
};

struct GenerateOptions {
  std::vector<PerturbationKind> kinds;  // empty -> all fifteen
  std::vector<std::string> tiers;       // empty -> easy, mid, hard
  std::uint64_t base_seed = 0;
  int workers = 0;                      // <= 0 -> hardware concurrency
  const Lexicon* lexicon = nullptr;     // null -> built-in
};

// Renders every (record, kind, tier) combination under
// out_root/<KIND>/<tier>/<id>.png (visual) or .jsonl (textual). Each item
// draws from a stream derived from (base_seed, id, kind, level index), so
// outputs do not depend on scheduling or worker count. Per-item failures
// are recorded in the manifest's error list; the run continues.
Manifest generate(std::span<const DatasetRecord> records,
                  const SeveritySchedule& schedule,
                  const GenerateOptions& options,
                  const std::filesystem::path& out_root);

// ----- scoring runs -----

struct GoldRecord {
  std::string id;
  std::string gold;
  std::string split;  // optional in the JSONL, defaults to ""
};

// JSONL loaders: one object per line; {id, gold[, split]} and
// {id, prediction[, kind, level_name]}.
std::vector<GoldRecord> load_gold_jsonl(const std::filesystem::path& file);
std::map<std::string, std::string> load_predictions_jsonl(
    const std::filesystem::path& file);

// Joins predictions against the manifest and gold answers, judges each
// with the relaxed matcher and aggregates. `predictions` is either a
// directory mirroring the run layout (<KIND>/<tier>/predictions.jsonl) or
// a single JSONL whose records carry kind and level_name. Missing
// predictions score as incorrect with a coverage warning; a prediction id
// absent from gold is a hard error.
ScoreReport score_run(const Manifest& manifest,
                      const std::filesystem::path& predictions,
                      const std::filesystem::path& clean_predictions,
                      std::span<const GoldRecord> gold);

}  // namespace chaos
