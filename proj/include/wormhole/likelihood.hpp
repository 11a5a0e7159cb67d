#pragma once

// Closed-form likelihood machinery: binary cross-entropy, angle fractions,
// the analytic negative log-likelihood at theta0 = k/n, and the sign-hash
// Hamming estimator that realizes the same quantity empirically.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wormhole/rng.hpp"
#include "wormhole/vec.hpp"

namespace wormhole {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct NllReport {
  double angle_fraction = 0.0;  // theta0 in [0,1]
  double nll_per_bit = 0.0;     // H2(theta0) in [0,1] bits
  std::optional<std::uint64_t> hamming_count;     // x, when estimated from hashes
  std::optional<std::uint64_t> hyperplane_count;  // n, when estimated from hashes
};

// Binary cross-entropy H2(theta) = -theta*log2(theta) - (1-theta)*log2(1-theta),
// with the continuous extension 0*log2(0) := 0 at the endpoints. Evaluation is
// canonicalized to the larger of (theta, 1-theta); the complement of a value
// >= 0.5 is exact in floating point, so h2(t) == h2(1-t) holds bit-exactly.
inline double h2(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::domain_error("h2: theta outside [0,1]");
  }
  const double q = theta >= 0.5 ? theta : 1.0 - theta;
  const double u = 1.0 - q;
  double s = -q * std::log2(q);
  if (u > 0.0) s -= u * std::log2(u);
  return s + 0.0;  // flush -0.0 at the endpoints
}

// theta0 = arccos(cos(w, w')) / pi. The cosine is clamped to [-1,1] so that
// numerically collinear inputs cannot produce NaN.
inline double angle_fraction(const RealVector& w, const RealVector& w_prime) {
  check_same_dim(w, w_prime, "angle_fraction");
  check_usable(w, "angle_fraction");
  check_usable(w_prime, "angle_fraction");
  double c = dot(w, w_prime) / (norm(w) * norm(w_prime));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c) / kPi;
}

// Analytic maximum-likelihood report at the optimum theta0 = k/n:
// nll_per_bit = -(1/n) log2(theta0^k (1-theta0)^(n-k)), which equals H2(k/n).
inline NllReport analytic_nll(std::uint64_t k, std::uint64_t n) {
  if (n < 1) throw std::domain_error("analytic_nll: n must be >= 1");
  if (k > n) throw std::domain_error("analytic_nll: k must satisfy 0 <= k <= n");
  const double theta = static_cast<double>(k) / static_cast<double>(n);
  double log_lik = 0.0;
  if (k > 0) log_lik += static_cast<double>(k) * std::log2(theta);
  if (k < n) log_lik += static_cast<double>(n - k) * std::log2(1.0 - theta);
  NllReport report;
  report.angle_fraction = theta;
  report.nll_per_bit = -log_lik / static_cast<double>(n);
  report.hamming_count = k;
  report.hyperplane_count = n;
  return report;
}

// n random hyperplanes in R^dim with standard-normal entries, regenerated
// on demand from the seed (row i is a pure function of (seed, i)).
struct HyperplaneSet {
  std::size_t count = 0;  // n
  std::size_t dim = 0;    // k
  std::uint64_t seed = 0;

  HyperplaneSet() = default;
  HyperplaneSet(std::size_t n, std::size_t k, std::uint64_t s) : count(n), dim(k), seed(s) {}

  void row(std::size_t i, double* out) const {
    rng::fill_normals(seed, rng::kHyperplanes, 0, static_cast<std::uint32_t>(i), dim, out);
  }

  std::vector<RealVector> materialize() const {
    std::vector<RealVector> rows(count, RealVector(dim));
    for (std::size_t i = 0; i < count; ++i) row(i, rows[i].data());
    return rows;
  }
};

// sgn(v_i . w) per hyperplane, with sgn(0) := +1 for determinism.
inline std::vector<int> signum_hash(const RealVector& w, const HyperplaneSet& planes) {
  if (w.size() != planes.dim) throw std::invalid_argument("signum_hash: dimension mismatch");
  check_usable(w, "signum_hash");
  std::vector<int> signs(planes.count);
  RealVector row(planes.dim);
  for (std::size_t i = 0; i < planes.count; ++i) {
    planes.row(i, row.data());
    signs[i] = dot(row, w) >= 0.0 ? 1 : -1;
  }
  return signs;
}

// Streams the hyperplanes once, hashing both vectors against each row, and
// reports the empirical disagreement fraction x/n together with its entropy.
inline NllReport hamming_fraction(const RealVector& w, const RealVector& w_prime,
                                  const HyperplaneSet& planes) {
  check_same_dim(w, w_prime, "hamming_fraction");
  if (w.size() != planes.dim) throw std::invalid_argument("hamming_fraction: dimension mismatch");
  check_usable(w, "hamming_fraction");
  check_usable(w_prime, "hamming_fraction");
  std::uint64_t differ = 0;
  RealVector row(planes.dim);
  for (std::size_t i = 0; i < planes.count; ++i) {
    planes.row(i, row.data());
    const bool s1 = dot(row, w) >= 0.0;
    const bool s2 = dot(row, w_prime) >= 0.0;
    if (s1 != s2) ++differ;
  }
  NllReport report;
  report.hamming_count = differ;
  report.hyperplane_count = planes.count;
  report.angle_fraction = static_cast<double>(differ) / static_cast<double>(planes.count);
  report.nll_per_bit = h2(report.angle_fraction);
  return report;
}

}  // namespace wormhole
