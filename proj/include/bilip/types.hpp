#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace bilip {

using Point = Eigen::VectorXd;

/// Closed interval [lo, hi] on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

using Rng = std::mt19937_64;

/// Engine for substream `stream` of a seeded computation. Work split into
/// fixed-size blocks draws block b from substream b, so results do not depend
/// on how many workers process the blocks.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace bilip
