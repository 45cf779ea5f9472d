#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bootsim/errors.hpp"

namespace bootsim::prng {

// Value-type generator state. Advancing is a pure function; two states with
// equal words produce identical output streams, which is what lets DDRS keep
// all ranks synchronized without communication.
struct RngState {
  std::uint64_t state = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

constexpr RngState rng_new(std::uint64_t seed) { return RngState{seed}; }

struct U64Step {
  std::uint64_t value;
  RngState next;
};

struct IndexStep {
  std::uint64_t index;
  RngState next;
};

// SplitMix64 step: one additive constant plus a three-stage mix. All
// arithmetic is mod 2^64, so the stream is bit-exact on every platform.
constexpr U64Step rng_next_u64(RngState s) {
  const std::uint64_t advanced = s.state + 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = advanced;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return U64Step{z ^ (z >> 31), RngState{advanced}};
}

// Uniform index in [0, bound) by plain modulo. Consumes exactly one generator
// step no matter the bound; synchronized streams must advance at a fixed,
// bound-independent rate. Modulo bias is at most 2^-32 relative for
// bound <= 2^32.
inline IndexStep rng_bounded_index(RngState s, std::uint64_t bound) {
  if (bound == 0) {
    throw DomainError("rng_bounded_index: bound must be >= 1");
  }
  const U64Step step = rng_next_u64(s);
  return IndexStep{step.value % bound, step.next};
}

// In-place conveniences for hot loops.
inline std::uint64_t draw_u64(RngState& s) {
  const U64Step step = rng_next_u64(s);
  s = step.next;
  return step.value;
}

inline std::uint64_t draw_index(RngState& s, std::uint64_t bound) {
  const IndexStep step = rng_bounded_index(s, bound);
  s = step.next;
  return step.index;
}

// Independent per-rank stream: one mixing step applied to
// seed XOR ((rank + 1) * 0x9E3779B97F4A7C15), all mod 2^64. Distinct ranks
// give distinct streams with overwhelming probability. Note that
// rank_substream(seed, 0) differs from rng_new(seed) in general.
RngState rank_substream(std::uint64_t seed, std::uint64_t rank);

// Maps a 64-bit word to (0, 1): top 53 bits scaled by 2^-53, with an exact
// zero remapped to 2^-53 so the logarithm in Box-Muller stays finite.
constexpr double to_unit_double(std::uint64_t u) {
  constexpr double kScale = 0x1.0p-53;
  const std::uint64_t top = u >> 11;
  return top == 0 ? kScale : static_cast<double>(top) * kScale;
}

// Deterministic standard normals: Box-Muller on consecutive uniform pairs.
// Advances the stream by two steps per pair (the trailing value of an odd
// count is discarded).
std::vector<double> standard_normal(RngState& s, std::size_t count);

}  // namespace bootsim::prng
