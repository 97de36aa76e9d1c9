#include "chaos/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaos {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {
constexpr std::uint64_t kPcgMult = 6364136223846793005ull;

std::uint32_t pcg_output(std::uint64_t state) {
  std::uint32_t xorshifted =
      static_cast<std::uint32_t>(((state >> 18) ^ state) >> 27);
  std::uint32_t rot = static_cast<std::uint32_t>(state >> 59);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}
}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  std::uint64_t initstate = splitmix64_next(sm);
  std::uint64_t initseq = splitmix64_next(sm);
  inc_ = (initseq << 1) | 1u;
  state_ = 0;
  (void)next_u32();
  state_ += initstate;
  (void)next_u32();
}

std::uint64_t RngStream::derive_seed(std::uint64_t base,
                                     std::span<const std::string> labels) {
  std::uint64_t h = base;
  for (const std::string& label : labels) {
    h ^= fnv1a64(label);
    (void)splitmix64_next(h);  // advances h
  }
  return h;
}

RngStream RngStream::derive(std::uint64_t base,
                            std::span<const std::string> labels) {
  return RngStream(derive_seed(base, labels));
}

RngStream RngStream::fork(std::string_view label) const {
  std::uint64_t h = seed_;
  h ^= fnv1a64(label);
  (void)splitmix64_next(h);
  return RngStream(h);
}

std::uint32_t RngStream::next_u32() {
  std::uint64_t old = state_;
  state_ = old * kPcgMult + inc_;
  return pcg_output(old);
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint32_t RngStream::uniform_below(std::uint32_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be > 0");
  // Lemire's multiply-reject; redraw count is data dependent but the
  // stream itself stays deterministic.
  std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
  std::uint32_t low = static_cast<std::uint32_t>(m);
  if (low < bound) {
    std::uint32_t threshold = (0u - bound) % bound;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(next_u32()) * bound;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

int RngStream::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  std::uint32_t span = static_cast<std::uint32_t>(
      static_cast<std::int64_t>(hi) - static_cast<std::int64_t>(lo) + 1);
  return lo + static_cast<int>(uniform_below(span));
}

double RngStream::gaussian() {
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1) keeps the log finite
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace chaos
