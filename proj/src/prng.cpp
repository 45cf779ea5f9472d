#include "bootsim/prng.hpp"

#include <cmath>
#include <numbers>

namespace bootsim::prng {

RngState rank_substream(std::uint64_t seed, std::uint64_t rank) {
  const std::uint64_t tag = (rank + 1) * 0x9E3779B97F4A7C15ULL;
  const U64Step mix = rng_next_u64(RngState{seed ^ tag});
  return RngState{mix.value};
}

std::vector<double> standard_normal(RngState& s, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  while (out.size() < count) {
    const double u1 = to_unit_double(draw_u64(s));
    const double u2 = to_unit_double(draw_u64(s));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out.push_back(radius * std::cos(angle));
    if (out.size() < count) {
      out.push_back(radius * std::sin(angle));
    }
  }
  return out;
}

}  // namespace bootsim::prng
