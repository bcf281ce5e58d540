// Counter-based random number generation (Philox4x32-10).
//
// Every draw is a pure function of (seed, trial, particle, step, purpose), so
// streams are reproducible bit-for-bit under any threading layout, and the
// synchronous-coupling construction (same increments for the interacting
// system and its nonlinear copies) needs no state bookkeeping at all.
#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace fhn {

// One 128-bit block of the Philox4x32 bijection with a 64-bit key, 10 rounds.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        std::uint64_t key);

// Distinct sub-streams drawn from one seed. Values are part of the on-disk
// reproducibility contract: do not renumber.
enum class Stream : std::uint32_t {
  path_noise = 0,   // Brownian increments along trajectories
  init_v = 1,       // initial voltage draws
  init_x = 2,       // initial adaptation draws
  mixture = 3,      // mixture-component / rejection draws in samplers
  perturbation = 4, // random directions for derivative checks
};

// Stateless generator: draws are addressed, never consumed in sequence.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform in (0, 1), 53-bit resolution.
  double uniform(std::uint32_t step, std::uint32_t particle, std::uint32_t trial,
                 Stream stream) const;

  // Standard normal (first component of the Box-Muller pair).
  double normal(std::uint32_t step, std::uint32_t particle, std::uint32_t trial,
                Stream stream) const;

  // Both Box-Muller components from one block, for samplers that need pairs.
  std::pair<double, double> normal_pair(std::uint32_t step, std::uint32_t particle,
                                        std::uint32_t trial, Stream stream) const;

private:
  std::uint64_t seed_;
};

} // namespace fhn
