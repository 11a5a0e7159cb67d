#pragma once

// Counter-based random number generation. Every draw is a pure function of
// (seed, stream, indices), so streams can be regenerated row by row without
// materializing them and results do not depend on thread count or platform.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>

namespace wormhole::rng {

// Philox 4x32-10 block cipher (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3"). 64-bit key, 128-bit counter, 128-bit output.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            std::array<std::uint32_t, 4> ctr) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
             static_cast<std::uint32_t>(p0)};
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return ctr;
  }
};

// Disjoint stream tags; the tag occupies the first counter word, so draws from
// different domains never collide even under the same seed.
enum Stream : std::uint32_t {
  kLayerRows = 1,    // weight rows, indices (layer, row)
  kHyperplanes = 2,  // LSH hyperplane rows, indices (0, row)
  kSamples = 3,      // synthetic test vectors, indices (0, sample)
  kShuffle = 4,      // permutation draws
  kDerive = 5,       // sub-seed derivation
  kImages = 6,       // synthetic image jitter
};

inline std::uint64_t to_u64(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Two independent standard normals from one Philox block via Box-Muller on
// fixed-width uniform draws.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t c0,
                                         std::uint32_t c1, std::uint32_t c2,
                                         std::uint32_t c3) {
  const auto b = Philox4x32::block(seed, {c0, c1, c2, c3});
  const std::uint64_t bits0 = to_u64(b[0], b[1]);
  const std::uint64_t bits1 = to_u64(b[2], b[3]);
  const double u1 = static_cast<double>((bits0 >> 11) + 1) * 0x1.0p-53;  // (0,1]
  const double u2 = static_cast<double>(bits1 >> 11) * 0x1.0p-53;        // [0,1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

// Fills out[0..len) with standard normals for stream element (tag, a, b).
// Normals are consumed in pairs; the pair index is the last counter word.
inline void fill_normals(std::uint64_t seed, Stream tag, std::uint32_t a,
                         std::uint32_t b, std::size_t len, double* out) {
  for (std::size_t p = 0; 2 * p < len; ++p) {
    const auto z = normal_pair(seed, tag, a, b, static_cast<std::uint32_t>(p));
    out[2 * p] = z[0];
    if (2 * p + 1 < len) out[2 * p + 1] = z[1];
  }
}

inline std::uint64_t next_u64(std::uint64_t seed, Stream tag, std::uint32_t a,
                              std::uint32_t b, std::uint32_t i) {
  const auto blk = Philox4x32::block(seed, {tag, a, b, i});
  return to_u64(blk[0], blk[1]);
}

// Deterministic sub-seed, e.g. per (digit, depth) experiment runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t a, std::uint32_t b) {
  return next_u64(seed, kDerive, a, b, 0);
}

}  // namespace wormhole::rng
