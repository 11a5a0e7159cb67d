#pragma once

// IDX (MNIST container) ingestion, synthetic sample generation, and the pixel
// normalization used throughout: bytes are divided by 255 into [0,1].

#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "wormhole/errors.hpp"
#include "wormhole/rng.hpp"
#include "wormhole/vec.hpp"

namespace wormhole {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct ImageSet {
  std::vector<RealVector> images;  // row-major pixels in [0,1]
  std::vector<int> labels;         // empty when no label file was attached
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t dim() const { return rows * cols; }
};

namespace detail {

inline std::uint32_t read_be32(std::span<const unsigned char> bytes, std::size_t pos,
                               const char* what) {
  if (pos + 4 > bytes.size()) {
    throw parse_error(std::string("idx: truncated while reading ") + what, pos);
  }
  return (static_cast<std::uint32_t>(bytes[pos]) << 24) |
         (static_cast<std::uint32_t>(bytes[pos + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[pos + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[pos + 3]);
}

}  // namespace detail

inline ImageSet parse_idx_images(std::span<const unsigned char> bytes) {
  const std::uint32_t magic = detail::read_be32(bytes, 0, "magic");
  if (magic != kIdxImagesMagic) {
    throw parse_error("idx: bad image magic", 0);
  }
  const std::uint32_t count = detail::read_be32(bytes, 4, "image count");
  const std::uint32_t rows = detail::read_be32(bytes, 8, "row count");
  const std::uint32_t cols = detail::read_be32(bytes, 12, "column count");
  const std::uint64_t pixels =
      static_cast<std::uint64_t>(count) * rows * cols;
  if (rows == 0 || cols == 0 || pixels > (std::uint64_t{1} << 40)) {
    throw parse_error("idx: implausible image dimensions", 8);
  }
  if (16 + pixels > bytes.size()) {
    throw parse_error("idx: truncated pixel payload", bytes.size());
  }
  ImageSet set;
  set.rows = rows;
  set.cols = cols;
  set.images.resize(count, RealVector(static_cast<std::size_t>(rows) * cols));
  std::size_t pos = 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    RealVector& img = set.images[i];
    for (double& px : img) px = static_cast<double>(bytes[pos++]) / 255.0;
  }
  return set;
}

inline std::vector<int> parse_idx_labels(std::span<const unsigned char> bytes) {
  const std::uint32_t magic = detail::read_be32(bytes, 0, "magic");
  if (magic != kIdxLabelsMagic) {
    throw parse_error("idx: bad label magic", 0);
  }
  const std::uint32_t count = detail::read_be32(bytes, 4, "label count");
  if (8 + static_cast<std::uint64_t>(count) > bytes.size()) {
    throw parse_error("idx: truncated label payload", bytes.size());
  }
  std::vector<int> labels(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const unsigned char v = bytes[8 + i];
    if (v > 9) {
      throw parse_error("idx: label value " + std::to_string(v) + " out of range", 8 + i);
    }
    labels[i] = v;
  }
  return labels;
}

// Inverse of parse_idx_images on the byte grid: pixel p maps back to
// round(p * 255).
inline std::vector<unsigned char> write_idx_images(const ImageSet& set) {
  std::vector<unsigned char> out;
  out.reserve(16 + set.images.size() * set.dim());
  auto put_be32 = [&out](std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
  };
  put_be32(kIdxImagesMagic);
  put_be32(static_cast<std::uint32_t>(set.images.size()));
  put_be32(static_cast<std::uint32_t>(set.rows));
  put_be32(static_cast<std::uint32_t>(set.cols));
  for (const auto& img : set.images) {
    for (double px : img) {
      out.push_back(static_cast<unsigned char>(std::lround(px * 255.0)));
    }
  }
  return out;
}

inline std::vector<unsigned char> write_idx_labels(const std::vector<int>& labels) {
  std::vector<unsigned char> out;
  out.reserve(8 + labels.size());
  auto put_be32 = [&out](std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
  };
  put_be32(kIdxLabelsMagic);
  put_be32(static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) out.push_back(static_cast<unsigned char>(l));
  return out;
}

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
}

inline ImageSet load_idx_dataset(const std::string& images_path,
                                 const std::string& labels_path = {}) {
  ImageSet set = parse_idx_images(read_file_bytes(images_path));
  if (!labels_path.empty()) {
    set.labels = parse_idx_labels(read_file_bytes(labels_path));
    if (set.labels.size() != set.images.size()) {
      throw parse_error("idx: label count does not match image count", 4);
    }
  }
  return set;
}

// Deterministic standard-normal test vectors; entry (i, j) is a pure function
// of (seed, i, j).
inline std::vector<RealVector> gaussian_samples(std::size_t count, std::size_t dim,
                                                std::uint64_t seed) {
  if (count < 1 || dim < 1) {
    throw std::domain_error("gaussian_samples: count and dim must be >= 1");
  }
  std::vector<RealVector> out(count, RealVector(dim));
  for (std::size_t i = 0; i < count; ++i) {
    rng::fill_normals(seed, rng::kSamples, 0, static_cast<std::uint32_t>(i), dim,
                      out[i].data());
  }
  return out;
}

inline constexpr double kTwoPiLocal = 6.283185307179586476925286766559;

// Synthetic 28x28 digit-like images: a ring/stroke distance field per digit
// class with per-image jitter. Same-class images correlate strongly, which is
// the property the image experiments rely on. Stand-in for runs without the
// real MNIST files.
inline ImageSet synthetic_digit_images(std::size_t count, std::uint64_t seed,
                                       int digit = -1) {
  constexpr std::size_t kSide = 28;
  ImageSet set;
  set.rows = kSide;
  set.cols = kSide;
  set.images.resize(count, RealVector(kSide * kSide, 0.0));
  set.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double jit[6];
    rng::fill_normals(seed, rng::kImages, 0, static_cast<std::uint32_t>(i), 6, jit);
    const int d = digit >= 0 ? digit : static_cast<int>(i % 10);
    set.labels[i] = d;
    // Class geometry: ellipse radii and an opening gap vary per digit class.
    const double cx = 13.5 + 1.2 * jit[0];
    const double cy = 13.5 + 1.2 * jit[1];
    const double rx = 6.0 + 0.45 * d + 0.6 * jit[2];
    const double ry = 8.0 - 0.25 * d + 0.6 * jit[3];
    const double gap = d == 0 ? -1.0 : 0.25 + 0.55 * static_cast<double>(d) / 9.0;
    const double gap_at = 0.6 * d + 0.3 * jit[4];
    const double thick = 1.6 + 0.15 * jit[5];
    RealVector& img = set.images[i];
    for (std::size_t y = 0; y < kSide; ++y) {
      for (std::size_t x = 0; x < kSide; ++x) {
        const double dx = (static_cast<double>(x) - cx) / rx;
        const double dy = (static_cast<double>(y) - cy) / ry;
        const double r = std::sqrt(dx * dx + dy * dy);
        double v = std::exp(-std::pow((r - 1.0) * 6.0 / thick, 2.0));
        if (gap > 0.0) {
          const double ang = std::atan2(dy, dx);
          double delta = std::fabs(ang - gap_at);
          while (delta > kTwoPiLocal) delta -= kTwoPiLocal;
          if (std::min(delta, kTwoPiLocal - delta) < gap) v *= 0.05;
        }
        if (v > 1.0) v = 1.0;
        if (v < 0.004) v = 0.0;
        img[y * kSide + x] = std::round(v * 255.0) / 255.0;
      }
    }
  }
  return set;
}

}  // namespace wormhole
