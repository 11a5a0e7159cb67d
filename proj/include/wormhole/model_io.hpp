#pragma once

// Flat binary model container, independent of host byte order.
//
//   offset  size  field
//   0       4     magic "WHLM"
//   4       4     version, u32 little-endian (currently 1)
//   8       4     k, u32 LE (square layer dimension)
//   12      4     L, u32 LE (layer count)
//   16      8     seed, u64 LE
//   24      8     c, IEEE-754 f64 LE (extended-space layer scale)
//   32      -     L row-major k*k blocks of f64 LE
//   then    -     L log norm gains, f64 LE
//
// The container carries exactly the trained weights; the anchor trajectory is
// reconstructed by replaying the anchor input through the loaded layers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "wormhole/errors.hpp"
#include "wormhole/maxlik.hpp"

namespace wormhole {

inline constexpr char kModelMagic[4] = {'W', 'H', 'L', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

struct ModelFile {
  std::uint32_t version = kModelVersion;
  std::uint32_t k = 0;
  std::uint32_t layer_count = 0;
  std::uint64_t seed = 0;
  double layer_scale_c = 1.0;
  std::vector<std::vector<double>> layers;
  std::vector<double> log_norm_gains;
};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_f64(std::vector<unsigned char>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos = 0;

  void need(std::size_t bytes, const char* what) const {
    if (pos + bytes > size) {
      throw parse_error(std::string("model: truncated while reading ") + what, pos);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
};

}  // namespace detail

inline std::vector<unsigned char> serialize_model(const ModelFile& m) {
  std::vector<unsigned char> out;
  out.reserve(32 + m.layers.size() * (static_cast<std::size_t>(m.k) * m.k + 1) * 8);
  out.insert(out.end(), kModelMagic, kModelMagic + 4);
  detail::put_u32(out, m.version);
  detail::put_u32(out, m.k);
  detail::put_u32(out, m.layer_count);
  detail::put_u64(out, m.seed);
  detail::put_f64(out, m.layer_scale_c);
  for (const auto& layer : m.layers) {
    for (double v : layer) detail::put_f64(out, v);
  }
  for (double g : m.log_norm_gains) detail::put_f64(out, g);
  return out;
}

inline ModelFile deserialize_model(const unsigned char* data, std::size_t size) {
  detail::Reader r{data, size};
  r.need(4, "magic");
  if (std::memcmp(data, kModelMagic, 4) != 0) {
    throw parse_error("model: bad magic, expected WHLM", 0);
  }
  r.pos = 4;
  ModelFile m;
  m.version = r.u32("version");
  if (m.version != kModelVersion) {
    throw parse_error("model: unsupported version " + std::to_string(m.version), 4);
  }
  m.k = r.u32("k");
  m.layer_count = r.u32("layer count");
  m.seed = r.u64("seed");
  m.layer_scale_c = r.f64("layer scale");
  if (m.k == 0 || m.layer_count == 0) {
    throw parse_error("model: k and L must be positive", 8);
  }
  const std::size_t kk = static_cast<std::size_t>(m.k) * m.k;
  m.layers.resize(m.layer_count);
  for (auto& layer : m.layers) {
    layer.resize(kk);
    for (double& v : layer) v = r.f64("layer block");
  }
  m.log_norm_gains.resize(m.layer_count);
  for (double& g : m.log_norm_gains) g = r.f64("log norm gain");
  if (r.pos != size) {
    throw parse_error("model: trailing bytes after payload", r.pos);
  }
  return m;
}

inline ModelFile to_model_file(const LinearModel& model) {
  ModelFile m;
  m.k = static_cast<std::uint32_t>(model.dim());
  m.layer_count = static_cast<std::uint32_t>(model.depth());
  m.seed = model.config.seed;
  m.layer_scale_c = model.config.layer_scale_c;
  m.layers = model.layers;
  m.log_norm_gains = model.log_norm_gains;
  return m;
}

// Rebuilds a full model from a container plus the anchor input it was trained
// on. The replayed trace is bit-identical to the trained one because the
// forward pass shares the training arithmetic. The container does not record
// the training width; the restored config keeps width = k.
inline LinearModel assemble_model(const ModelFile& m, const RealVector& anchor_input) {
  LinearModel model;
  model.layers = m.layers;
  model.log_norm_gains = m.log_norm_gains;
  model.config = NetConfig{m.k, m.k, m.layer_count, m.seed, m.layer_scale_c};
  LayerTrace trace = forward_traced(model, anchor_input, "anchor");
  model.anchor_trace = std::move(trace.per_layer);
  return model;
}

inline void save_model(const LinearModel& model, const std::string& path) {
  const auto bytes = serialize_model(to_model_file(model));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path);
}

inline ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return deserialize_model(bytes.data(), bytes.size());
}

}  // namespace wormhole
