#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tbh {

// ============================================================
// Philox4x32-10 counter-based random number generator.
//
// Every draw is a pure function of (key, counter): members of an
// ensemble own disjoint counter blocks, so any worker can generate
// any member's noise in any order and the sampled values never
// depend on the parallel schedule.
// ============================================================

/// One 10-round Philox4x32 block: 128-bit counter -> 128 random bits.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;   // golden ratio
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;   // sqrt(3) - 1
  constexpr std::uint32_t kMult0 = 0xD2511F53u;
  constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Purpose tag kept in the counter so distinct uses of one seed draw from
/// disjoint streams.
enum class DrawTag : std::uint32_t {
  member_noise = 1,      ///< per-member Gaussian fluctuations
  equilibrium_draw = 2,  ///< Gibbs draws for base states and single runs
};

/// A pair of independent standard normal deviates.
struct GaussianPair {
  double first = 0.0;
  double second = 0.0;
};

/// Standard normals from counter (index, tag, stream) under `seed`,
/// via one Philox block and the Box-Muller transform.
inline GaussianPair gaussian_pair(std::uint64_t seed, DrawTag tag,
                                  std::uint64_t stream, std::uint32_t index) {
  const std::array<std::uint32_t, 4> ctr = {
      index, static_cast<std::uint32_t>(tag),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::array<std::uint32_t, 4> r = philox4x32(ctr, key);
  const std::uint64_t a =
      (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b =
      (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  // u1 in (0, 1] keeps the logarithm finite; u2 in [0, 1).
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace tbh
