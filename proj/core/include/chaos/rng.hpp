#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace chaos {

// FNV-1a, 64 bit. Used for label hashing and artifact checksums.
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::string to_hex(std::uint64_t v);

// One splitmix64 step; advances state and returns the next value.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Deterministic generator with an explicitly pinned algorithm (PCG32,
// 64-bit state / 32-bit output) so streams reproduce across platforms and
// standard library versions. All distributions are hand-rolled for the
// same reason; std::uniform_* are not portable.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Stable seed derivation: folds each label into the base seed via
  // FNV-1a + splitmix64. Used to give every (record, kind, level) its own
  // stream regardless of generation order.
  static std::uint64_t derive_seed(std::uint64_t base,
                                   std::span<const std::string> labels);
  static RngStream derive(std::uint64_t base,
                          std::span<const std::string> labels);

  // Child stream keyed by this stream's seed and a label. The parent is
  // not advanced.
  RngStream fork(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1), 53-bit resolution.
  double uniform();
  // Uniform on [lo,hi).
  double uniform(double lo, double hi);
  // Unbiased integer on [0,bound); bound must be > 0 (Lemire rejection).
  std::uint32_t uniform_below(std::uint32_t bound);
  // Inclusive integer range.
  int uniform_int(int lo, int hi);
  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double gaussian();

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
};

}  // namespace chaos
