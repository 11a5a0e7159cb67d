#pragma once

// Wormhole experiments: extended-space distance between +/-eta scaled output
// directions, fooling-example generation z = P - eta * w_hat_L, and label
// reconciliation recovering P from a random label P' plus z.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wormhole/csv.hpp"
#include "wormhole/dataset.hpp"
#include "wormhole/likelihood.hpp"
#include "wormhole/maxlik.hpp"

namespace wormhole {

struct WormholePair {
  RealVector point_p;        // -eta [0; u_hat], dim k+1
  RealVector point_p_prime;  // +eta [0; u_hat'], dim k+1
  double eta = 0.0;
  double distance = 0.0;     // ||P - P'|| = eta ||u_hat + u_hat'||
};

inline WormholePair wormhole_distance(const LinearModel& model, const RealVector& w,
                                      const RealVector& w_prime, double eta) {
  if (!(eta > 0.0)) throw std::domain_error("wormhole_distance: eta must be > 0");
  const RealVector u = forward_full(model, w);
  const RealVector u_prime = forward_full(model, w_prime);
  WormholePair pair;
  pair.eta = eta;
  pair.point_p.assign(u.size() + 1, 0.0);
  pair.point_p_prime.assign(u.size() + 1, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    pair.point_p[i + 1] = -eta * u[i];
    pair.point_p_prime[i + 1] = eta * u_prime[i];
  }
  pair.distance = distance(pair.point_p, pair.point_p_prime);
  return pair;
}

// z = P - eta * w_hat_L; for any eta, ||z - P|| = eta up to rounding.
inline RealVector generate_fooling(const LinearModel& model, const RealVector& image_p,
                                   double eta) {
  if (image_p.size() != model.dim()) {
    throw std::invalid_argument("generate_fooling: dimension mismatch");
  }
  if (!(eta >= 0.0)) throw std::domain_error("generate_fooling: eta must be >= 0");
  RealVector z = image_p;
  axpy(-eta, model.anchor_output(), z);
  return z;
}

struct ReconciliationRecord {
  RealVector meaningful_label;  // P (empty when unknown)
  RealVector fooling_example;   // z
  RealVector random_label;      // P' = z + eta * s * u_hat'
  RealVector reconstruction;    // P_hat = P' - eta (s u_hat' - w_hat_L)
  double eta = 0.0;
  int sign = 1;                 // s: correlated (+1) or anti-correlated (-1) branch
  double rel_error = 0.0;          // ||P_hat - P|| / ||P||
  double wormhole_residual = 0.0;  // ||P' - P|| / ||P|| = eta ||s u_hat' - w_hat_L|| / ||P||
  std::size_t depth = 0;
  int digit = -1;
};

namespace detail {

inline ReconciliationRecord reconcile_from_units(const RealVector& z,
                                                 const RealVector& u_prime,
                                                 const RealVector& anchor_unit,
                                                 double eta,
                                                 const std::optional<RealVector>& true_p) {
  ReconciliationRecord rec;
  rec.eta = eta;
  rec.sign = dot(u_prime, anchor_unit) >= 0.0 ? 1 : -1;
  const double s = static_cast<double>(rec.sign);

  rec.fooling_example = z;
  rec.random_label = z;
  axpy(eta * s, u_prime, rec.random_label);
  // P_hat = P' - eta (s u_hat' - w_hat_L); algebraically z + eta w_hat_L.
  rec.reconstruction = rec.random_label;
  axpy(-eta * s, u_prime, rec.reconstruction);
  axpy(eta, anchor_unit, rec.reconstruction);

  if (true_p) {
    rec.meaningful_label = *true_p;
    const double p_norm = norm(*true_p);
    if (p_norm > 0.0) {
      rec.rel_error = distance(rec.reconstruction, *true_p) / p_norm;
      rec.wormhole_residual = distance(rec.random_label, *true_p) / p_norm;
    }
  }
  return rec;
}

}  // namespace detail

// u_hat' = H(w'), s = sign(u_hat' . w_hat_L) with s = +1 on zero. Reports the
// pixel rel_error of P_hat (exact algebra, tiny by construction) and the
// wormhole residual ||P' - P|| / ||P||, the quantity depth drives to zero.
inline ReconciliationRecord reconcile(const LinearModel& model, const RealVector& z,
                                      const RealVector& w_prime, double eta,
                                      const std::optional<RealVector>& true_p = {}) {
  if (z.size() != model.dim()) throw std::invalid_argument("reconcile: z dimension mismatch");
  if (true_p && true_p->size() != z.size()) {
    throw std::invalid_argument("reconcile: label dimension mismatch");
  }
  if (!(eta >= 0.0)) throw std::domain_error("reconcile: eta must be >= 0");
  const RealVector u_prime = forward_full(model, w_prime);
  return detail::reconcile_from_units(z, u_prime, model.anchor_output(), eta, true_p);
}

// Writes a 28x28 (or rows x cols) pixel grid, one CSV row per image row.
inline void export_image_grid(const RealVector& image, std::size_t rows, std::size_t cols,
                              const std::string& path) {
  CsvWriter csv(path);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::string> cells;
    cells.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) cells.push_back(format_real(image[r * cols + c]));
    csv.row(cells);
  }
}

// Per digit: one random Gaussian anchor w and test input w' (seeded by
// derive_seed(base, digit, 0)), one model per depth. Depths within a digit
// share the seed, so deeper runs extend shallower ones and the residual trend
// follows a single trajectory; the deepest model is trained once and sliced.
inline std::vector<ReconciliationRecord> reconciliation_experiment(
    const ImageSet& digits, const NetConfig& base_cfg, double eta,
    const std::vector<std::size_t>& depths, unsigned threads = 1,
    const std::string& export_dir = {}) {
  if (digits.images.empty()) {
    throw std::domain_error("reconciliation_experiment: empty digit set");
  }
  if (depths.empty()) throw config_error("reconciliation_experiment: empty depth list");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 1) throw config_error("reconciliation_experiment: depths must be >= 1");
    if (i > 0 && depths[i] <= depths[i - 1]) {
      throw config_error("reconciliation_experiment: depths must ascend");
    }
  }
  const std::size_t k = digits.dim();
  if (k != base_cfg.input_dim) {
    throw std::invalid_argument("reconciliation_experiment: image dim != net.input_dim");
  }

  std::vector<ReconciliationRecord> records;
  records.reserve(digits.images.size() * depths.size());
  for (std::size_t d = 0; d < digits.images.size(); ++d) {
    const RealVector& p = digits.images[d];
    const int digit_label = d < digits.labels.size() ? digits.labels[d] : static_cast<int>(d);
    const std::uint64_t digit_seed =
        rng::derive_seed(base_cfg.seed, static_cast<std::uint32_t>(d), 0);
    NetConfig cfg = base_cfg;
    cfg.seed = digit_seed;
    cfg.depth = depths.back();
    const auto inputs = gaussian_samples(2, k, digit_seed);
    const LinearModel model = train_maxlikelihood(inputs[0], cfg, threads);
    const LayerTrace probe = forward_traced(model, inputs[1]);

    for (std::size_t depth : depths) {
      const RealVector& anchor_unit = model.anchor_trace[depth - 1];
      RealVector z = p;
      axpy(-eta, anchor_unit, z);
      ReconciliationRecord rec = detail::reconcile_from_units(
          z, probe.per_layer[depth - 1], anchor_unit, eta, p);
      rec.depth = depth;
      rec.digit = digit_label;
      if (!export_dir.empty()) {
        export_image_grid(rec.reconstruction, digits.rows, digits.cols,
                          export_dir + "/recon_d" + std::to_string(digit_label) + "_L" +
                              std::to_string(depth) + ".csv");
      }
      records.push_back(std::move(rec));
    }
    if (!export_dir.empty()) {
      export_image_grid(p, digits.rows, digits.cols,
                        export_dir + "/original_d" + std::to_string(digit_label) + ".csv");
    }
  }
  return records;
}

}  // namespace wormhole
