#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wormhole/errors.hpp"

namespace wormhole {

using RealVector = std::vector<double>;

inline double dot(const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const RealVector& v) { return dot(v, v); }

inline double norm(const RealVector& v) { return std::sqrt(squared_norm(v)); }

inline bool all_finite(const RealVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void check_same_dim(const RealVector& a, const RealVector& b, const char* where) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
}

inline void check_usable(const RealVector& v, const char* where) {
  if (v.empty()) throw degenerate_input_error(std::string(where) + ": empty vector");
  if (!all_finite(v)) throw degenerate_input_error(std::string(where) + ": non-finite entry");
  if (norm(v) == 0.0) throw degenerate_input_error(std::string(where) + ": zero vector");
}

// Returns v / ||v||; caller guarantees the norm is nonzero.
inline RealVector normalized(const RealVector& v) {
  const double n = norm(v);
  RealVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

inline RealVector scaled(const RealVector& v, double alpha) {
  RealVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * v[i];
  return out;
}

inline RealVector add(const RealVector& a, const RealVector& b) {
  RealVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline RealVector sub(const RealVector& a, const RealVector& b) {
  RealVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// out += alpha * v
inline void axpy(double alpha, const RealVector& v, RealVector& out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += alpha * v[i];
}

inline double distance(const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace wormhole
