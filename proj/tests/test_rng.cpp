#include "wormhole/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace rng = wormhole::rng;

// Known-answer vectors for Philox 4x32-10 from the reference distribution.
TEST(Philox, KnownAnswerVectors) {
  {
    const auto out = rng::Philox4x32::block(0, {0, 0, 0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
  }
  {
    const std::uint64_t key = (std::uint64_t{0x299f31d0u} << 32) | 0xa4093822u;
    const auto out = rng::Philox4x32::block(key, {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
  }
  {
    const std::uint64_t key = ~std::uint64_t{0};
    const auto out = rng::Philox4x32::block(
        key, {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
  }
}

TEST(Rng, NormalsAreDeterministic) {
  std::vector<double> a(17), b(17);
  rng::fill_normals(42, rng::kLayerRows, 3, 9, a.size(), a.data());
  rng::fill_normals(42, rng::kLayerRows, 3, 9, b.size(), b.data());
  EXPECT_EQ(a, b);

  std::vector<double> c(17);
  rng::fill_normals(43, rng::kLayerRows, 3, 9, c.size(), c.data());
  EXPECT_NE(a, c);
}

TEST(Rng, StreamsAreDisjoint) {
  std::vector<double> rows(8), planes(8), samples(8);
  rng::fill_normals(7, rng::kLayerRows, 0, 5, 8, rows.data());
  rng::fill_normals(7, rng::kHyperplanes, 0, 5, 8, planes.data());
  rng::fill_normals(7, rng::kSamples, 0, 5, 8, samples.data());
  EXPECT_NE(rows, planes);
  EXPECT_NE(rows, samples);
  EXPECT_NE(planes, samples);
}

TEST(Rng, PrefixStability) {
  // Requesting a longer block must not change the shared prefix.
  std::vector<double> small(5), large(11);
  rng::fill_normals(99, rng::kSamples, 0, 1, small.size(), small.data());
  rng::fill_normals(99, rng::kSamples, 0, 1, large.size(), large.data());
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], large[i]);
}

TEST(Rng, NormalMomentsMatchStandardGaussian) {
  // CLT bound: one million draws, |mean| below 5 sigma = 0.005.
  const std::size_t n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; i += 2) {
    const auto z = rng::normal_pair(1234, rng::kSamples, 0,
                                    static_cast<std::uint32_t>(i / 2), 0);
    sum += z[0] + z[1];
    sum_sq += z[0] * z[0] + z[1] * z[1];
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - mean * mean;
  EXPECT_LT(std::fabs(mean), 0.005);
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(Rng, DeriveSeedSeparatesRuns) {
  const auto s1 = rng::derive_seed(5, 0, 1);
  const auto s2 = rng::derive_seed(5, 0, 2);
  const auto s3 = rng::derive_seed(5, 1, 1);
  EXPECT_NE(s1, s2);
  EXPECT_NE(s1, s3);
  EXPECT_EQ(s1, rng::derive_seed(5, 0, 1));
}
