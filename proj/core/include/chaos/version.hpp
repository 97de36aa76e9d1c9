#pragma once

namespace chaos {

inline constexpr const char* kVersion = "1.0.0";

// Bumped whenever generated bytes could change (operator tweaks, RNG layout,
// schedule defaults). Recorded in run manifests so stale outputs are
// distinguishable from fresh ones.
inline constexpr const char* kGeneratorVersion = "chaos-gen-1";

}  // namespace chaos
