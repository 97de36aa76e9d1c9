#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace chaos {

// The fifteen perturbation families: ten visual (rendered into chart
// pixels) and five textual (applied to the query string).
enum class PerturbationKind {
  DF,  // defocus blur
  VB,  // vibration / motion blur
  WP,  // warping
  OM,  // omission (shift + rotate out of frame)
  IB,  // ink bleeding (erosion of bright values)
  IH,  // ink holdout (dilation of bright values)
  OB,  // obstacle: shadow or glare occlusion
  FD,  // fading (linear contrast/brightness)
  SP,  // speckle blob noise
  TX,  // paper texture blend
  CA,  // character addition
  CD,  // character deletion
  CR,  // character replacement
  CS,  // character swap
  WM,  // word modification
};

inline constexpr int kKindCount = 15;

bool is_visual(PerturbationKind kind);
bool is_textual(PerturbationKind kind);

// Two-letter code used in file layouts, schedules and manifests.
std::string_view kind_code(PerturbationKind kind);
std::optional<PerturbationKind> kind_from_code(std::string_view code);

std::span<const PerturbationKind> all_kinds();
std::span<const PerturbationKind> visual_kinds();
std::span<const PerturbationKind> textual_kinds();

}  // namespace chaos
