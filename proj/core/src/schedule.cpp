#include "chaos/schedule.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chaos/errors.hpp"

namespace chaos {

namespace {
using nlohmann::json;

// Severity-controlling parameter per kind; validate() requires it to be
// non-decreasing across levels 1..10.
struct ControlKey {
  const char* name;
};

ControlKey control_key(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::DF: return {"sigma"};
    case PerturbationKind::VB: return {"length"};
    case PerturbationKind::WP: return {"displacement"};
    case PerturbationKind::OM: return {"shift_frac"};
    case PerturbationKind::IB: return {"diameter"};
    case PerturbationKind::IH: return {"diameter"};
    case PerturbationKind::OB: return {"polygons"};
    case PerturbationKind::FD: return {"brightness"};
    case PerturbationKind::SP: return {"density"};
    case PerturbationKind::TX: return {"fibers"};
    case PerturbationKind::CA:
    case PerturbationKind::CD:
    case PerturbationKind::CR:
    case PerturbationKind::CS:
    case PerturbationKind::WM: return {"rate"};
  }
  return {"?"};
}

ParamMap default_params(PerturbationKind kind, int level) {
  const double l = level;
  switch (kind) {
    case PerturbationKind::DF:
      return {{"sigma", 0.4 * l}};
    case PerturbationKind::VB:
      return {{"length", 2.0 * l + 1.0}};
    case PerturbationKind::WP:
      return {{"displacement", 2.0 * l}, {"field_sigma", 8.0}};
    case PerturbationKind::OM:
      return {{"shift_frac", 0.04 * l}, {"max_rot_deg", 1.5 * l}};
    case PerturbationKind::IB:
    case PerturbationKind::IH:
      return {{"diameter", 2.0 * l + 1.0}, {"scale", 10.0}};
    case PerturbationKind::OB:
      return {{"polygons", l},
              {"shadow_factor", 1.0 - 0.08 * l},
              {"glare_factor", 1.0 + 0.08 * l},
              {"mask_sigma", 3.0}};
    case PerturbationKind::FD:
      return {{"contrast", 1.0 - 0.07 * l}, {"brightness", 0.07 * l}};
    case PerturbationKind::SP:
      return {{"density", 0.01 * l}, {"blob_sigma", 2.0}, {"strength", 0.9}};
    case PerturbationKind::TX:
      return {{"blend", 1.0 - 0.06 * l}, {"fibers", 10.0 * l},
              {"grain_noise", 0.05}};
    case PerturbationKind::CA:
    case PerturbationKind::CD:
    case PerturbationKind::CR:
    case PerturbationKind::CS:
    case PerturbationKind::WM:
      return {{"rate", 0.02 * l}};
  }
  return {};
}
}  // namespace

int NamedLevels::get(std::string_view name) const {
  if (name == "easy") return easy;
  if (name == "mid") return mid;
  if (name == "hard") return hard;
  throw ConfigError("unknown named level '" + std::string(name) +
                    "' (expected easy, mid or hard)");
}

double PerturbationSpec::param(std::string_view name) const {
  auto it = params.find(std::string(name));
  if (it == params.end()) {
    throw ConfigError("missing parameter '" + std::string(name) + "' for " +
                      std::string(kind_code(kind)));
  }
  return it->second;
}

double PerturbationSpec::param(std::string_view name, double dflt) const {
  auto it = params.find(std::string(name));
  return it == params.end() ? dflt : it->second;
}

SeveritySchedule SeveritySchedule::defaults() {
  SeveritySchedule s;
  for (PerturbationKind kind : all_kinds()) {
    auto& rows = s.levels_[kind];
    for (int level = 1; level <= kMaxLevel; ++level) {
      rows[level - 1] = default_params(kind, level);
    }
    s.named_[kind] = NamedLevels{};
  }
  return s;
}

SeveritySchedule SeveritySchedule::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("schedule: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("schedule: top level must be an object");

  SeveritySchedule s;
  s.levels_.clear();
  s.named_.clear();
  if (!doc.contains("schema_version")) {
    throw ConfigError("schedule: missing schema_version");
  }
  s.schema_version_ = doc["schema_version"].is_string()
                          ? doc["schema_version"].get<std::string>()
                          : doc["schema_version"].dump();

  for (const auto& [key, value] : doc.items()) {
    if (key == "schema_version") continue;
    auto kind = kind_from_code(key);
    if (!kind) throw ConfigError("schedule: unknown kind '" + key + "'");
    if (!value.is_object() || !value.contains("levels") ||
        !value.contains("named")) {
      throw ConfigError("schedule: " + key + " needs 'levels' and 'named'");
    }
    const json& rows = value["levels"];
    if (!rows.is_array() || rows.size() != kMaxLevel) {
      throw ConfigError("schedule: " + key + " must list exactly 10 levels");
    }
    auto& dst = s.levels_[*kind];
    for (int i = 0; i < kMaxLevel; ++i) {
      if (!rows[i].is_object()) {
        throw ConfigError("schedule: " + key + " level " +
                          std::to_string(i + 1) + " must be an object");
      }
      for (const auto& [pname, pval] : rows[i].items()) {
        if (!pval.is_number()) {
          throw ConfigError("schedule: " + key + "." + pname +
                            " must be numeric");
        }
        dst[i][pname] = pval.get<double>();
      }
    }
    const json& named = value["named"];
    NamedLevels nl;
    for (const char* tier : {"easy", "mid", "hard"}) {
      if (!named.contains(tier) || !named[tier].is_number_integer()) {
        throw ConfigError("schedule: " + key + " named." + tier +
                          " must be an integer level");
      }
    }
    nl.easy = named["easy"].get<int>();
    nl.mid = named["mid"].get<int>();
    nl.hard = named["hard"].get<int>();
    s.named_[*kind] = nl;
  }

  for (PerturbationKind kind : all_kinds()) {
    if (!s.levels_.count(kind)) {
      throw ConfigError("schedule: missing kind " +
                        std::string(kind_code(kind)));
    }
  }
  s.validate();
  return s;
}

SeveritySchedule SeveritySchedule::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("schedule: cannot open " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::string SeveritySchedule::to_json_text() const {
  json doc;
  doc["schema_version"] = schema_version_;
  for (const auto& [kind, rows] : levels_) {
    json entry;
    entry["levels"] = json::array();
    for (const ParamMap& row : rows) {
      json obj = json::object();
      for (const auto& [name, value] : row) obj[name] = value;
      entry["levels"].push_back(obj);
    }
    const NamedLevels& nl = named_.at(kind);
    entry["named"] = {{"easy", nl.easy}, {"mid", nl.mid}, {"hard", nl.hard}};
    doc[std::string(kind_code(kind))] = entry;
  }
  return doc.dump(2) + "\n";
}

void SeveritySchedule::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("schedule: cannot write " + file.string());
  out << to_json_text();
  if (!out) throw IoError("schedule: write failed for " + file.string());
}

const ParamMap& SeveritySchedule::params_for(PerturbationKind kind,
                                             int level) const {
  if (level < 1 || level > kMaxLevel) {
    throw ConfigError("schedule: level " + std::to_string(level) +
                      " out of range 1..10");
  }
  auto it = levels_.find(kind);
  if (it == levels_.end()) {
    throw ConfigError("schedule: no entry for kind " +
                      std::string(kind_code(kind)));
  }
  return it->second[level - 1];
}

const NamedLevels& SeveritySchedule::named(PerturbationKind kind) const {
  auto it = named_.find(kind);
  if (it == named_.end()) {
    throw ConfigError("schedule: no named levels for kind " +
                      std::string(kind_code(kind)));
  }
  return it->second;
}

int SeveritySchedule::named_level(PerturbationKind kind,
                                  std::string_view name) const {
  return named(kind).get(name);
}

void SeveritySchedule::validate() const {
  for (PerturbationKind kind : all_kinds()) {
    auto it = levels_.find(kind);
    if (it == levels_.end()) {
      throw ConfigError("schedule: missing kind " +
                        std::string(kind_code(kind)));
    }
    const char* key = control_key(kind).name;
    double prev = -1e300;
    for (int level = 1; level <= kMaxLevel; ++level) {
      const ParamMap& row = it->second[level - 1];
      auto p = row.find(key);
      if (p == row.end()) {
        throw ConfigError("schedule: " + std::string(kind_code(kind)) +
                          " level " + std::to_string(level) +
                          " lacks severity parameter '" + key + "'");
      }
      if (p->second < prev) {
        throw ConfigError("schedule: " + std::string(kind_code(kind)) + " '" +
                          key + "' decreases at level " +
                          std::to_string(level));
      }
      prev = p->second;
    }
    const NamedLevels& nl = named(kind);
    for (int tier : {nl.easy, nl.mid, nl.hard}) {
      if (tier < 1 || tier > kMaxLevel) {
        throw ConfigError("schedule: " + std::string(kind_code(kind)) +
                          " named level " + std::to_string(tier) +
                          " outside 1..10");
      }
    }
    if (nl.easy > nl.mid || nl.mid > nl.hard) {
      throw ConfigError("schedule: " + std::string(kind_code(kind)) +
                        " named levels must satisfy easy <= mid <= hard");
    }
  }
}

PerturbationSpec resolve_spec(PerturbationKind kind, int level,
                              const SeveritySchedule& schedule) {
  if (level < 0 || level > kMaxLevel) {
    throw ConfigError("level " + std::to_string(level) + " out of range 0..10");
  }
  PerturbationSpec spec;
  spec.kind = kind;
  spec.level = level;
  if (level > 0) spec.params = schedule.params_for(kind, level);
  return spec;
}

}  // namespace chaos
