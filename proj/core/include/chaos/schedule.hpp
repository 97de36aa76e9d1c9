#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "chaos/kind.hpp"

namespace chaos {

// Resolved operator parameters, name -> scalar.
using ParamMap = std::map<std::string, double>;

// Severity-level indices (1..10) published for the three named tiers.
struct NamedLevels {
  int easy = 3;
  int mid = 5;
  int hard = 9;

  int get(std::string_view name) const;  // "easy" | "mid" | "hard"

  bool operator==(const NamedLevels&) const = default;
};

inline constexpr int kMaxLevel = 10;

// A fully resolved request: which operator, at which severity, with which
// parameters. Level 0 is the identity for every kind and carries no params.
struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::DF;
  int level = 0;
  ParamMap params;

  double param(std::string_view name) const;            // missing -> throws
  double param(std::string_view name, double dflt) const;
};

// Per-kind parameter tables for levels 1..10 plus the named tier map.
// The built-in defaults encode the severity ramps the generator ships with;
// external JSON files can override them wholesale.
class SeveritySchedule {
 public:
  static SeveritySchedule defaults();
  static SeveritySchedule load(const std::filesystem::path& file);
  static SeveritySchedule from_json_text(const std::string& text);

  void save(const std::filesystem::path& file) const;
  std::string to_json_text() const;

  const ParamMap& params_for(PerturbationKind kind, int level) const;
  const NamedLevels& named(PerturbationKind kind) const;
  int named_level(PerturbationKind kind, std::string_view name) const;

  std::string schema_version() const { return schema_version_; }

  // Rejects schedules whose severity-controlling parameter decreases with
  // level, named levels outside 1..10, or easy/mid/hard out of order.
  void validate() const;

  bool operator==(const SeveritySchedule&) const = default;

 private:
  std::string schema_version_ = "1";
  std::map<PerturbationKind, std::array<ParamMap, kMaxLevel>> levels_;
  std::map<PerturbationKind, NamedLevels> named_;
};

// Looks up the schedule row and builds the spec. Level 0 bypasses the
// schedule entirely. Throws ConfigError for levels outside 0..10.
PerturbationSpec resolve_spec(PerturbationKind kind, int level,
                              const SeveritySchedule& schedule);

}  // namespace chaos
