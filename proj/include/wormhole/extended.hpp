#pragma once

// Extended vector space R^(k+1): layer outputs embedded with a layer-index
// coordinate l*c. The layer component d_l = l*c / sqrt((l*c)^2 + ||w_l||^2)
// shrinks toward zero when norm maximization makes ||w_l|| outgrow l*c, and
// saturates toward one in the unoptimized regime where ||w_l|| stays O(1).

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "wormhole/likelihood.hpp"
#include "wormhole/maxlik.hpp"
#include "wormhole/vec.hpp"

namespace wormhole {

struct ExtendedPoint {
  double layer_component = 0.0;  // d_l in [0,1]
  RealVector spatial;            // dim k; layer_component^2 + ||spatial||^2 = 1
  std::size_t layer_index = 0;   // 1-based
};

// Builds the unit point [l*c; w_l] / ||[l*c; w_l]|| from the unit spatial
// direction and log ||w_l||. Works entirely in log space so reconstructed
// norms like exp(150) cannot overflow.
inline ExtendedPoint make_extended_point(std::size_t ell, double c,
                                         const RealVector& unit_spatial,
                                         double log_norm) {
  if (ell < 1) throw std::domain_error("make_extended_point: layer index must be >= 1");
  if (!(c > 0.0)) throw std::domain_error("make_extended_point: c must be > 0");
  const double log_lc = std::log(static_cast<double>(ell) * c);
  const double x = 2.0 * (log_norm - log_lc);
  // layer_component = 1/sqrt(1+e^x), spatial scale = 1/sqrt(1+e^-x).
  double d, scale;
  if (x > 700.0) {
    d = std::exp(-0.5 * x);
    scale = 1.0;
  } else if (x < -700.0) {
    d = 1.0;
    scale = std::exp(0.5 * x);
  } else {
    d = 1.0 / std::sqrt(1.0 + std::exp(x));
    scale = 1.0 / std::sqrt(1.0 + std::exp(-x));
  }
  ExtendedPoint p;
  p.layer_component = d;
  p.spatial = scaled(unit_spatial, scale);
  p.layer_index = ell;
  return p;
}

// Embeds layer ell of a trace; the effective unnormalized norm is
// exp(sum of the trace's log gains up to ell).
inline ExtendedPoint embed_extended(const LayerTrace& trace, const LinearModel& model,
                                    std::size_t ell) {
  if (ell < 1 || ell > trace.per_layer.size()) {
    throw std::domain_error("embed_extended: layer index out of range");
  }
  double log_norm = 0.0;
  for (std::size_t j = 0; j < ell; ++j) log_norm += trace.log_norm_gains[j];
  return make_extended_point(ell, model.config.layer_scale_c, trace.per_layer[ell - 1],
                             log_norm);
}

// Anchor trajectory variant, using the gains recorded at training time.
inline ExtendedPoint embed_extended_anchor(const LinearModel& model, std::size_t ell) {
  if (ell < 1 || ell > model.depth()) {
    throw std::domain_error("embed_extended_anchor: layer index out of range");
  }
  double log_norm = 0.0;
  for (std::size_t j = 0; j < ell; ++j) log_norm += model.log_norm_gains[j];
  return make_extended_point(ell, model.config.layer_scale_c, model.anchor_trace[ell - 1],
                             log_norm);
}

inline double extended_angle_fraction(const ExtendedPoint& p, const ExtendedPoint& q) {
  check_same_dim(p.spatial, q.spatial, "extended_angle_fraction");
  double c = p.layer_component * q.layer_component + dot(p.spatial, q.spatial);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c) / kPi;
}

}  // namespace wormhole
