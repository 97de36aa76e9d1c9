#include "chaos/kind.hpp"

#include <array>

namespace chaos {

namespace {
constexpr std::array<PerturbationKind, 15> kAll = {
    PerturbationKind::DF, PerturbationKind::VB, PerturbationKind::WP,
    PerturbationKind::OM, PerturbationKind::IB, PerturbationKind::IH,
    PerturbationKind::OB, PerturbationKind::FD, PerturbationKind::SP,
    PerturbationKind::TX, PerturbationKind::CA, PerturbationKind::CD,
    PerturbationKind::CR, PerturbationKind::CS, PerturbationKind::WM,
};

constexpr std::array<std::string_view, 15> kCodes = {
    "DF", "VB", "WP", "OM", "IB", "IH", "OB", "FD",
    "SP", "TX", "CA", "CD", "CR", "CS", "WM",
};
}  // namespace

bool is_visual(PerturbationKind kind) {
  return static_cast<int>(kind) < static_cast<int>(PerturbationKind::CA);
}

bool is_textual(PerturbationKind kind) { return !is_visual(kind); }

std::string_view kind_code(PerturbationKind kind) {
  return kCodes[static_cast<int>(kind)];
}

std::optional<PerturbationKind> kind_from_code(std::string_view code) {
  for (std::size_t i = 0; i < kCodes.size(); ++i) {
    if (kCodes[i] == code) return kAll[i];
  }
  return std::nullopt;
}

std::span<const PerturbationKind> all_kinds() { return kAll; }

std::span<const PerturbationKind> visual_kinds() {
  return std::span<const PerturbationKind>(kAll).first(10);
}

std::span<const PerturbationKind> textual_kinds() {
  return std::span<const PerturbationKind>(kAll).last(5);
}

}  // namespace chaos
