#include "chaos/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "chaos/errors.hpp"
#include "chaos/image_io.hpp"
#include "chaos/raster.hpp"
#include "chaos/rng.hpp"
#include "chaos/text.hpp"
#include "chaos/version.hpp"
#include "chaos/visual.hpp"

namespace chaos {

namespace {

using nlohmann::json;

std::string sanitize_id(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' ||
                        s.back() == ' ' || s.back() == '\t')) {
    s.pop_back();
  }
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

// Checksum over dimensions plus raw samples, stable across encoders.
std::string raster_checksum(const Raster& img) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  feed(std::to_string(img.width));
  feed("x");
  feed(std::to_string(img.height));
  feed(":");
  for (std::uint8_t b : img.data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return to_hex(h);
}

std::string text_checksum(std::string_view s) { return to_hex(fnv1a64(s)); }

void ingest_chartqa(const std::filesystem::path& root, IngestResult& result) {
  struct SplitFile {
    const char* split;
    const char* file;
  };
  bool any = false;
  for (SplitFile sf : {SplitFile{"human", "test_human.json"},
                       SplitFile{"augmented", "test_augmented.json"}}) {
    std::filesystem::path ann = root / sf.file;
    if (!std::filesystem::exists(ann)) continue;
    any = true;
    json doc;
    try {
      doc = json::parse(read_text_file(ann));
    } catch (const json::exception& e) {
      throw ConfigError(ann.string() + ": invalid JSON: " + e.what());
    }
    if (!doc.is_array()) {
      throw ConfigError(ann.string() + ": expected a top-level array");
    }
    std::map<std::string, int> per_image;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const json& item = doc[i];
      if (!item.is_object() || !item.contains("imgname") ||
          !item.contains("query") || !item.contains("label") ||
          !item["imgname"].is_string() || !item["query"].is_string()) {
        result.errors.push_back(ann.string() + ": record " +
                                std::to_string(i) +
                                " lacks imgname/query/label");
        continue;
      }
      std::string imgname = item["imgname"].get<std::string>();
      std::filesystem::path img = root / "png" / imgname;
      if (!std::filesystem::exists(img)) {
        result.errors.push_back(std::string(sf.split) + ": missing image " +
                                imgname);
        continue;
      }
      std::string stem = std::filesystem::path(imgname).stem().string();
      int q = per_image[stem]++;
      DatasetRecord rec;
      rec.id = sanitize_id(std::string(sf.split) + "-" + stem + "-q" +
                           std::to_string(q));
      rec.image = img;
      rec.query = item["query"].get<std::string>();
      rec.gold = item["label"].is_string() ? item["label"].get<std::string>()
                                           : item["label"].dump();
      rec.split = sf.split;
      result.records.push_back(std::move(rec));
    }
  }
  if (!any) {
    throw IoError("chartqa layout: neither test_human.json nor "
                  "test_augmented.json found under " +
                  root.string());
  }
}

void ingest_chart2text(const std::filesystem::path& root,
                       IngestResult& result) {
  bool any = false;
  for (const char* source : {"pew", "statista"}) {
    std::filesystem::path imgs = root / source / "imgs";
    if (!std::filesystem::is_directory(imgs)) continue;
    any = true;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(imgs)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& img : files) {
      std::string stem = img.stem().string();
      std::filesystem::path cap = root / source / "captions" / (stem + ".txt");
      if (!std::filesystem::exists(cap)) {
        result.errors.push_back(std::string(source) + "/" + stem +
                                ": caption file missing");
        continue;
      }
      DatasetRecord rec;
      rec.id = sanitize_id(std::string(source) + "-" + stem);
      rec.image = img;
      rec.query.clear();  // captioning samples carry no question
      rec.gold = trimmed(read_text_file(cap));
      rec.split = source;
      result.records.push_back(std::move(rec));
    }
  }
  if (!any) {
    throw IoError(
        "chart2text layout: neither pew/imgs nor statista/imgs found under " +
        root.string());
  }
}

}  // namespace

IngestResult ingest(const std::filesystem::path& root, DatasetLayout layout) {
  if (!std::filesystem::is_directory(root)) {
    throw IoError("dataset root is not a directory: " + root.string());
  }
  IngestResult result;
  if (layout == DatasetLayout::chartqa) {
    ingest_chartqa(root, result);
  } else {
    ingest_chart2text(root, result);
  }
  std::set<std::string> seen;
  for (const DatasetRecord& rec : result.records) {
    if (!seen.insert(rec.id).second) {
      throw ConfigError("ingest: duplicate record id '" + rec.id + "'");
    }
  }
  return result;
}

// ----- manifest -----

std::string Manifest::to_json_text() const {
  json doc;
  doc["schema_version"] = schema_version;
  doc["generator_version"] = generator_version;
  doc["base_seed"] = base_seed;
  doc["schedule_checksum"] = schedule_checksum;
  doc["errors"] = errors;
  doc["entries"] = json::array();
  for (const ManifestEntry& e : entries) {
    json obj;
    obj["id"] = e.id;
    obj["kind"] = std::string(kind_code(e.kind));
    obj["level_name"] = e.level_name;
    obj["level_index"] = e.level_index;
    obj["params"] = e.params;
    obj["seed"] = e.derived_seed;
    obj["output_path"] = e.output_path;
    obj["input_checksum"] = e.input_checksum;
    obj["output_checksum"] = e.output_checksum;
    doc["entries"].push_back(obj);
  }
  return doc.dump(2) + "\n";
}

Manifest Manifest::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: invalid JSON: ") + e.what());
  }
  Manifest m;
  try {
    m.schema_version = doc.at("schema_version").get<std::string>();
    m.generator_version = doc.at("generator_version").get<std::string>();
    m.base_seed = doc.at("base_seed").get<std::uint64_t>();
    m.schedule_checksum = doc.at("schedule_checksum").get<std::string>();
    m.errors = doc.value("errors", std::vector<std::string>{});
    for (const json& obj : doc.at("entries")) {
      ManifestEntry e;
      e.id = obj.at("id").get<std::string>();
      std::string code = obj.at("kind").get<std::string>();
      auto kind = kind_from_code(code);
      if (!kind) throw ConfigError("manifest: unknown kind '" + code + "'");
      e.kind = *kind;
      e.level_name = obj.at("level_name").get<std::string>();
      e.level_index = obj.at("level_index").get<int>();
      for (const auto& [k, v] : obj.at("params").items()) {
        e.params[k] = v.get<double>();
      }
      e.derived_seed = obj.at("seed").get<std::uint64_t>();
      e.output_path = obj.at("output_path").get<std::string>();
      e.input_checksum = obj.at("input_checksum").get<std::string>();
      e.output_checksum = obj.at("output_checksum").get<std::string>();
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: missing or mistyped field: ") +
                      e.what());
  }
  return m;
}

void Manifest::save(const std::filesystem::path& file) const {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("manifest: cannot write " + tmp.string());
    out << to_json_text();
    if (!out) throw IoError("manifest: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);  // atomic publish
}

Manifest Manifest::load(const std::filesystem::path& file) {
  return from_json_text(read_text_file(file));
}

// ----- generation -----

namespace {

std::string tier_dir(PerturbationKind kind, const std::string& tier) {
  return std::string(kind_code(kind)) + "/" + tier;
}

}  // namespace

Manifest generate(std::span<const DatasetRecord> records,
                  const SeveritySchedule& schedule,
                  const GenerateOptions& options,
                  const std::filesystem::path& out_root) {
  schedule.validate();
  std::vector<PerturbationKind> kinds = options.kinds;
  if (kinds.empty()) {
    kinds.assign(all_kinds().begin(), all_kinds().end());
  }
  std::vector<std::string> tiers = options.tiers;
  if (tiers.empty()) tiers = {"easy", "mid", "hard"};
  for (PerturbationKind kind : kinds) {
    for (const std::string& tier : tiers) {
      (void)schedule.named_level(kind, tier);  // validates the tier name
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_root, ec);
  if (ec || !std::filesystem::is_directory(out_root)) {
    throw IoError("output root not writable: " + out_root.string());
  }
  {
    std::filesystem::path probe = out_root / ".write_probe";
    std::ofstream test(probe, std::ios::binary | std::ios::trunc);
    if (!test) throw IoError("output root not writable: " + out_root.string());
    test.close();
    std::filesystem::remove(probe);
  }
  for (PerturbationKind kind : kinds) {
    for (const std::string& tier : tiers) {
      std::filesystem::create_directories(out_root /
                                          std::string(kind_code(kind)) / tier);
    }
  }

  const Lexicon* lexicon = options.lexicon;
  static const Lexicon builtin_lexicon = Lexicon::builtin();
  if (!lexicon) lexicon = &builtin_lexicon;

  const bool wants_visual =
      std::any_of(kinds.begin(), kinds.end(),
                  [](PerturbationKind k) { return is_visual(k); });

  Manifest manifest;
  manifest.generator_version = kGeneratorVersion;
  manifest.base_seed = options.base_seed;
  manifest.schedule_checksum = to_hex(fnv1a64(schedule.to_json_text()));

  std::mutex merge_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    std::vector<ManifestEntry> local_entries;
    std::vector<std::string> local_errors;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= records.size()) break;
      const DatasetRecord& rec = records[i];

      Raster img;
      std::string img_checksum;
      bool have_image = false;
      if (wants_visual) {
        try {
          img = read_image(rec.image);
          img_checksum = raster_checksum(img);
          have_image = true;
        } catch (const std::exception& e) {
          local_errors.push_back(rec.id + ": " + e.what());
        }
      }
      std::string query_checksum = text_checksum(rec.query);

      for (PerturbationKind kind : kinds) {
        const bool visual = is_visual(kind);
        if (visual && !have_image) continue;
        for (const std::string& tier : tiers) {
          int level = schedule.named_level(kind, tier);
          try {
            PerturbationSpec spec = resolve_spec(kind, level, schedule);
            std::vector<std::string> labels = {
                rec.id, std::string(kind_code(kind)), std::to_string(level)};
            std::uint64_t seed =
                RngStream::derive_seed(options.base_seed, labels);
            RngStream rng(seed);

            ManifestEntry entry;
            entry.id = rec.id;
            entry.kind = kind;
            entry.level_name = tier;
            entry.level_index = level;
            entry.params = spec.params;
            entry.derived_seed = seed;

            if (visual) {
              Raster out = apply_visual(img, spec, rng);
              entry.output_path = tier_dir(kind, tier) + "/" + rec.id + ".png";
              write_png(out, out_root / entry.output_path);
              entry.input_checksum = img_checksum;
              entry.output_checksum = raster_checksum(out);
            } else {
              TextSample sample;
              sample.text = rec.query;
              TextSample out = apply_textual(sample, spec, rng, lexicon);
              json line;
              line["id"] = rec.id;
              line["kind"] = std::string(kind_code(kind));
              line["level_name"] = tier;
              line["level_index"] = level;
              line["original"] = rec.query;
              line["perturbed"] = out.text;
              line["notes"] = out.metadata;
              entry.output_path =
                  tier_dir(kind, tier) + "/" + rec.id + ".jsonl";
              std::filesystem::path dst = out_root / entry.output_path;
              std::ofstream f(dst, std::ios::binary | std::ios::trunc);
              if (!f) throw IoError("cannot write " + dst.string());
              f << line.dump() << "\n";
              if (!f) throw IoError("write failed for " + dst.string());
              entry.input_checksum = query_checksum;
              entry.output_checksum = text_checksum(out.text);
            }
            local_entries.push_back(std::move(entry));
          } catch (const std::exception& e) {
            local_errors.push_back(rec.id + "/" +
                                   std::string(kind_code(kind)) + "/" + tier +
                                   ": " + e.what());
          }
        }
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    manifest.entries.insert(manifest.entries.end(),
                            std::make_move_iterator(local_entries.begin()),
                            std::make_move_iterator(local_entries.end()));
    manifest.errors.insert(manifest.errors.end(), local_errors.begin(),
                           local_errors.end());
  };

  int workers = options.workers;
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  workers = std::min<std::size_t>(workers, std::max<std::size_t>(records.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // canonical order: results do not depend on scheduling
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              auto ka = std::make_tuple(kind_code(a.kind), a.level_name, a.id);
              auto kb = std::make_tuple(kind_code(b.kind), b.level_name, b.id);
              return ka < kb;
            });
  std::sort(manifest.errors.begin(), manifest.errors.end());
  manifest.save(out_root / "manifest.json");
  return manifest;
}

// ----- scoring -----

namespace {

json parse_jsonl_line(const std::string& line, const std::filesystem::path& file,
                      std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                      ": invalid JSON: " + e.what());
  }
}

std::string string_field(const json& obj, const char* key,
                         const std::filesystem::path& file, std::size_t lineno) {
  if (!obj.contains(key)) {
    throw ConfigError(file.string() + ":" + std::to_string(lineno) +
                      ": missing field '" + key + "'");
  }
  const json& v = obj[key];
  if (v.is_string()) return v.get<std::string>();
  return v.dump();  // numbers and booleans come through as their literal
}

}  // namespace

std::vector<GoldRecord> load_gold_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("gold: cannot open " + file.string());
  std::vector<GoldRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) continue;
    json obj = parse_jsonl_line(line, file, lineno);
    GoldRecord rec;
    rec.id = string_field(obj, "id", file, lineno);
    rec.gold = string_field(obj, "gold", file, lineno);
    rec.split = obj.contains("split") ? string_field(obj, "split", file, lineno)
                                      : std::string();
    out.push_back(std::move(rec));
  }
  return out;
}

std::map<std::string, std::string> load_predictions_jsonl(
    const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("predictions: cannot open " + file.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) continue;
    json obj = parse_jsonl_line(line, file, lineno);
    std::string id = string_field(obj, "id", file, lineno);
    if (!out.emplace(id, string_field(obj, "prediction", file, lineno)).second) {
      throw ConfigError(file.string() + ": duplicate prediction for id '" +
                        id + "'");
    }
  }
  return out;
}

ScoreReport score_run(const Manifest& manifest,
                      const std::filesystem::path& predictions,
                      const std::filesystem::path& clean_predictions,
                      std::span<const GoldRecord> gold) {
  struct GoldEntry {
    std::string answer;
    std::string split;
  };
  std::map<std::string, GoldEntry> gold_map;
  for (const GoldRecord& g : gold) {
    if (!gold_map.emplace(g.id, GoldEntry{g.gold, g.split}).second) {
      throw ConfigError("gold: duplicate id '" + g.id + "'");
    }
  }
  if (gold_map.empty()) throw ConfigError("gold: no records");

  std::vector<std::string> warnings;

  // clean pass
  std::map<std::string, std::string> clean_preds =
      load_predictions_jsonl(clean_predictions);
  for (const auto& [id, pred] : clean_preds) {
    (void)pred;
    if (!gold_map.count(id)) {
      throw ConfigError("clean predictions: id '" + id + "' not in gold");
    }
  }
  std::map<std::string, CleanSet> clean_sets;
  std::size_t clean_covered = 0;
  for (const auto& [id, entry] : gold_map) {
    CleanSet& set = clean_sets[entry.split];
    set.split = entry.split;
    set.total += 1;
    auto it = clean_preds.find(id);
    if (it == clean_preds.end()) continue;
    ++clean_covered;
    if (relaxed_match(entry.answer, it->second).correct) set.correct += 1;
  }
  if (clean_covered < gold_map.size()) {
    warnings.push_back("clean predictions cover " +
                       std::to_string(clean_covered) + " of " +
                       std::to_string(gold_map.size()) +
                       " gold records; the rest score as incorrect");
  }

  // perturbed pass
  const bool dir_mode = std::filesystem::is_directory(predictions);
  std::map<std::string, std::map<std::string, std::string>> per_cell;
  if (dir_mode) {
    std::set<std::string> cells;
    for (const ManifestEntry& e : manifest.entries) {
      cells.insert(tier_dir(e.kind, e.level_name));
    }
    for (const std::string& cell : cells) {
      std::filesystem::path f = predictions / cell / "predictions.jsonl";
      if (!std::filesystem::exists(f)) {
        warnings.push_back("no predictions for " + cell +
                           "; its samples score as incorrect");
        continue;
      }
      per_cell[cell] = load_predictions_jsonl(f);
    }
  } else {
    std::ifstream in(predictions, std::ios::binary);
    if (!in) throw IoError("predictions: cannot open " + predictions.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trimmed(line).empty()) continue;
      json obj = parse_jsonl_line(line, predictions, lineno);
      std::string id = string_field(obj, "id", predictions, lineno);
      std::string kind = string_field(obj, "kind", predictions, lineno);
      std::string tier = string_field(obj, "level_name", predictions, lineno);
      std::string pred = string_field(obj, "prediction", predictions, lineno);
      if (!kind_from_code(kind)) {
        throw ConfigError(predictions.string() + ":" + std::to_string(lineno) +
                          ": unknown kind '" + kind + "'");
      }
      if (!per_cell[kind + "/" + tier].emplace(id, pred).second) {
        throw ConfigError(predictions.string() + ": duplicate prediction for " +
                          kind + "/" + tier + "/" + id);
      }
    }
  }

  std::size_t total_preds = 0;
  for (const auto& [cell, preds] : per_cell) {
    for (const auto& [id, pred] : preds) {
      (void)pred;
      ++total_preds;
      if (!gold_map.count(id)) {
        throw ConfigError("predictions for " + cell + ": id '" + id +
                          "' not in gold");
      }
    }
  }
  if (total_preds == 0) {
    throw ConfigError("no predictions found under " + predictions.string());
  }

  std::map<std::tuple<PerturbationKind, std::string, std::string>, JudgmentSet>
      tallies;
  std::size_t covered = 0;
  for (const ManifestEntry& e : manifest.entries) {
    auto git = gold_map.find(e.id);
    if (git == gold_map.end()) {
      throw ConfigError("manifest entry '" + e.id + "' not present in gold");
    }
    JudgmentSet& set =
        tallies[{e.kind, e.level_name, git->second.split}];
    set.kind = e.kind;
    set.level = e.level_name;
    set.split = git->second.split;
    set.total += 1;
    std::string cell = tier_dir(e.kind, e.level_name);
    auto cit = per_cell.find(cell);
    if (cit == per_cell.end()) continue;
    auto pit = cit->second.find(e.id);
    if (pit == cit->second.end()) continue;
    ++covered;
    if (relaxed_match(git->second.answer, pit->second).correct) {
      set.correct += 1;
    }
  }
  if (covered < manifest.entries.size()) {
    warnings.push_back("predictions cover " + std::to_string(covered) +
                       " of " + std::to_string(manifest.entries.size()) +
                       " perturbed samples; the rest score as incorrect");
  }

  std::vector<JudgmentSet> cells;
  cells.reserve(tallies.size());
  for (auto& [key, set] : tallies) cells.push_back(set);
  std::vector<CleanSet> clean_list;
  clean_list.reserve(clean_sets.size());
  for (auto& [split, set] : clean_sets) clean_list.push_back(set);

  ScoreReport report = aggregate(cells, clean_list);
  report.warnings.insert(report.warnings.end(), warnings.begin(),
                         warnings.end());
  return report;
}

}  // namespace chaos
