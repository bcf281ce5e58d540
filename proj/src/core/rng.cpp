#include "core/rng.hpp"

#include <cmath>

namespace fhn {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
  const std::uint32_t out0 = static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0;
  const std::uint32_t out1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t out2 = static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1;
  const std::uint32_t out3 = static_cast<std::uint32_t>(p0);
  c[0] = out0;
  c[1] = out1;
  c[2] = out2;
  c[3] = out3;
}

// 53-bit uniform in (0,1): never returns 0, so log() below is safe.
inline double to_uniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        std::uint64_t key) {
  std::uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c[0], c[1], c[2], c[3]};
}

double CounterRng::uniform(std::uint32_t step, std::uint32_t particle,
                           std::uint32_t trial, Stream stream) const {
  const auto out =
      philox4x32({step, particle, trial, static_cast<std::uint32_t>(stream)}, seed_);
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  return to_uniform(bits);
}

std::pair<double, double> CounterRng::normal_pair(std::uint32_t step,
                                                  std::uint32_t particle,
                                                  std::uint32_t trial,
                                                  Stream stream) const {
  const auto out =
      philox4x32({step, particle, trial, static_cast<std::uint32_t>(stream)}, seed_);
  const std::uint64_t bits_a =
      (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  const std::uint64_t bits_b =
      (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  const double u1 = to_uniform(bits_a);
  const double u2 = to_uniform(bits_b);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double CounterRng::normal(std::uint32_t step, std::uint32_t particle,
                          std::uint32_t trial, Stream stream) const {
  return normal_pair(step, particle, trial, stream).first;
}

} // namespace fhn
