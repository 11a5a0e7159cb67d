#include "wormhole/model_io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>

#include "wormhole/dataset.hpp"

using wormhole::assemble_model;
using wormhole::deserialize_model;
using wormhole::LinearModel;
using wormhole::ModelFile;
using wormhole::NetConfig;
using wormhole::serialize_model;
using wormhole::to_model_file;

namespace {

LinearModel small_model() {
  const auto w = wormhole::gaussian_samples(1, 3, 42)[0];
  return wormhole::train_maxlikelihood(w, NetConfig{3, 12, 4, 7, 2.5});
}

}  // namespace

TEST(ModelIo, HeaderLayout) {
  const auto bytes = serialize_model(to_model_file(small_model()));
  ASSERT_GE(bytes.size(), 32u);
  EXPECT_EQ(bytes[0], 'W');
  EXPECT_EQ(bytes[1], 'H');
  EXPECT_EQ(bytes[2], 'L');
  EXPECT_EQ(bytes[3], 'M');
  // version 1, k = 3, L = 4 as little-endian u32.
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 3);
  EXPECT_EQ(bytes[12], 4);
  // seed 7 as little-endian u64 at offset 16.
  EXPECT_EQ(bytes[16], 7);
  EXPECT_EQ(bytes.size(), 32u + 4u * (9u + 1u) * 8u);
}

TEST(ModelIo, ByteRoundTripIsExact) {
  const auto model = small_model();
  const auto bytes = serialize_model(to_model_file(model));
  const auto parsed = deserialize_model(bytes.data(), bytes.size());
  const auto bytes2 = serialize_model(parsed);
  EXPECT_EQ(bytes, bytes2);

  EXPECT_EQ(parsed.k, 3u);
  EXPECT_EQ(parsed.layer_count, 4u);
  EXPECT_EQ(parsed.seed, 7u);
  EXPECT_EQ(parsed.layer_scale_c, 2.5);
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(parsed.layers[l], model.layers[l]);
  }
  EXPECT_EQ(parsed.log_norm_gains, model.log_norm_gains);
}

TEST(ModelIo, AssembleRebuildsAnchorTrace) {
  const auto w = wormhole::gaussian_samples(1, 3, 42)[0];
  const auto model = small_model();
  const auto bytes = serialize_model(to_model_file(model));
  const auto parsed = deserialize_model(bytes.data(), bytes.size());
  const auto rebuilt = assemble_model(parsed, w);
  ASSERT_EQ(rebuilt.anchor_trace.size(), model.anchor_trace.size());
  for (std::size_t l = 0; l < model.anchor_trace.size(); ++l) {
    EXPECT_EQ(rebuilt.anchor_trace[l], model.anchor_trace[l]);
  }
}

TEST(ModelIo, FileRoundTrip) {
  const auto model = small_model();
  const std::string path = testing::TempDir() + "/roundtrip.whlm";
  wormhole::save_model(model, path);
  const auto loaded = wormhole::load_model_file(path);
  EXPECT_EQ(loaded.k, 3u);
  EXPECT_EQ(loaded.layers, model.layers);
  std::remove(path.c_str());
}

TEST(ModelIo, RejectsCorruptInput) {
  const auto bytes = serialize_model(to_model_file(small_model()));

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  try {
    deserialize_model(bad_magic.data(), bad_magic.size());
    FAIL() << "expected parse_error";
  } catch (const wormhole::parse_error& e) {
    EXPECT_EQ(e.offset, 0u);
  }

  try {
    deserialize_model(bytes.data(), bytes.size() - 5);
    FAIL() << "expected parse_error";
  } catch (const wormhole::parse_error& e) {
    EXPECT_GT(e.offset, 32u);
  }

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_model(trailing.data(), trailing.size()), wormhole::parse_error);
}
