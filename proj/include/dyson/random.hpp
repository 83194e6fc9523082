#pragma once

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <random>

namespace dyson {

using Rng = std::mt19937_64;

/// Independent stream tags, so that e.g. Z and Y ensembles drawn with the same
/// master seed do not share noise.
enum class StreamPurpose : std::uint32_t {
  kLattice = 1,
  kSde = 2,
  kEntrance = 3,
  kCone = 4,
  kIntertwineLhs = 5,
  kIntertwineRhs = 6,
  kCalibration = 7,
  kLatticeAlt = 8,
  kTest = 99,
};

/// Per-trajectory random streams derived from (master seed, purpose, index).
/// A trajectory's draws never depend on scheduling or on other trajectories.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t master_seed) : master_(master_seed) {}

  Rng stream(StreamPurpose purpose, std::uint64_t index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(master_),
                      static_cast<std::uint32_t>(master_ >> 32),
                      static_cast<std::uint32_t>(purpose),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
  }

  std::uint64_t master_seed() const { return master_; }

 private:
  std::uint64_t master_;
};

/// Standard normal via the ziggurat in Boost.Random.
inline double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> nd;
  return nd(rng);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace dyson
