#pragma once

// Gradient-free training of the feedforward linear stack: each layer keeps the
// k rows (out of n candidates) that maximize the output norm of the current
// anchor direction. Candidate rows are regenerated from the seed on the fly,
// so memory stays O(k^2) regardless of width.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wormhole/errors.hpp"
#include "wormhole/parallel.hpp"
#include "wormhole/rng.hpp"
#include "wormhole/vec.hpp"

namespace wormhole {

struct NetConfig {
  std::size_t input_dim = 0;   // k
  std::size_t width = 0;       // n >= k
  std::size_t depth = 0;       // L >= 1
  std::uint64_t seed = 0;
  double layer_scale_c = 1.0;  // extended-space layer axis scale

  bool operator==(const NetConfig&) const = default;
};

inline void validate(const NetConfig& cfg) {
  if (cfg.input_dim < 1) throw config_error("net.input_dim must be >= 1");
  if (cfg.width < cfg.input_dim) throw config_error("net.width must be >= net.input_dim");
  if (cfg.depth < 1) throw config_error("net.depth must be >= 1");
  if (!(cfg.layer_scale_c > 0.0)) throw config_error("net.layer_scale_c must be > 0");
}

// Per-layer unit outputs of one sample pushed through the stack, together with
// the log norm gains accumulated before each renormalization.
struct LayerTrace {
  std::vector<RealVector> per_layer;   // L unit vectors
  std::vector<double> log_norm_gains;  // log ||G_l w_hat_{l-1}||, L entries
  std::string sample_id;
};

struct LinearModel {
  std::vector<std::vector<double>> layers;  // L row-major k*k matrices
  std::vector<double> log_norm_gains;       // anchor gains, L entries
  std::vector<RealVector> anchor_trace;     // anchor unit outputs, L entries
  NetConfig config;

  std::size_t dim() const { return config.input_dim; }
  std::size_t depth() const { return layers.size(); }
  const RealVector& anchor_output() const { return anchor_trace.back(); }
};

struct RowSelection {
  std::vector<double> matrix;             // k x k, rows in ascending source index
  std::vector<std::uint32_t> row_indices; // ascending
  std::vector<double> output;             // matrix * w, same order as rows
  double norm_gain = 0.0;                 // ||matrix * w||
};

namespace detail {

struct RowScore {
  double score;        // (v . w)^2
  double dot;          // v . w
  std::uint32_t index;
};

// Total order used everywhere a selection is made: higher squared dot first,
// ties broken by lower source row index.
inline bool stronger(const RowScore& a, const RowScore& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.index < b.index;
}

// Streaming top-k over one contiguous index range.
inline std::vector<RowScore> topk_range(const RealVector& w, std::uint64_t seed,
                                        std::uint32_t layer, std::uint32_t begin,
                                        std::uint32_t end, std::size_t k) {
  std::vector<RowScore> kept;
  kept.reserve(k + 1);
  RealVector row(w.size());
  for (std::uint32_t i = begin; i < end; ++i) {
    rng::fill_normals(seed, rng::kLayerRows, layer, i, w.size(), row.data());
    const double d = dot(row, w);
    const RowScore cand{d * d, d, i};
    if (kept.size() < k) {
      kept.push_back(cand);
      std::push_heap(kept.begin(), kept.end(), stronger);  // weakest at front
    } else if (stronger(cand, kept.front())) {
      std::pop_heap(kept.begin(), kept.end(), stronger);
      kept.back() = cand;
      std::push_heap(kept.begin(), kept.end(), stronger);
    }
  }
  return kept;
}

}  // namespace detail

// Selects the k rows of the n x k candidate matrix (regenerated from
// (seed, layer)) that maximize ||G w||; equivalently the k largest (v . w)^2.
// The merge across chunks is a pure function of the (score, index) set, so
// the result is identical for any thread count.
inline RowSelection row_topk_select(const RealVector& w, std::size_t width,
                                    std::uint64_t seed, std::uint32_t layer,
                                    unsigned threads = 1) {
  check_usable(w, "row_topk_select");
  const std::size_t k = w.size();
  if (width < k) throw config_error("row_topk_select: width must be >= dim");

  std::vector<std::vector<detail::RowScore>> partials(chunk_count(width, threads));
  parallel_chunks(width, threads, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    partials[chunk] = detail::topk_range(w, seed, layer, static_cast<std::uint32_t>(begin),
                                         static_cast<std::uint32_t>(end), k);
  });

  std::vector<detail::RowScore> all;
  for (const auto& p : partials) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end(), detail::stronger);
  all.resize(k);
  std::sort(all.begin(), all.end(),
            [](const detail::RowScore& a, const detail::RowScore& b) {
              return a.index < b.index;
            });

  RowSelection sel;
  sel.matrix.resize(k * k);
  sel.row_indices.resize(k);
  sel.output.resize(k);
  double sq = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    sel.row_indices[r] = all[r].index;
    sel.output[r] = all[r].dot;
    sq += all[r].score;
    rng::fill_normals(seed, rng::kLayerRows, layer, all[r].index, k,
                      sel.matrix.data() + r * k);
  }
  sel.norm_gain = std::sqrt(sq);
  return sel;
}

// Algorithm: normalize, select, apply, renormalize, for layers 1..L. Gains are
// kept in log space so deep stacks cannot overflow.
inline LinearModel train_maxlikelihood(const RealVector& w, const NetConfig& cfg,
                                       unsigned threads = 1) {
  validate(cfg);
  if (w.size() != cfg.input_dim) {
    throw std::invalid_argument("train_maxlikelihood: input dim does not match config");
  }
  check_usable(w, "train_maxlikelihood");

  LinearModel model;
  model.config = cfg;
  model.layers.reserve(cfg.depth);
  model.log_norm_gains.reserve(cfg.depth);
  model.anchor_trace.reserve(cfg.depth);

  RealVector cur = normalized(w);
  for (std::size_t l = 1; l <= cfg.depth; ++l) {
    RowSelection sel =
        row_topk_select(cur, cfg.width, cfg.seed, static_cast<std::uint32_t>(l), threads);
    if (sel.norm_gain == 0.0) {
      throw degenerate_input_error("train_maxlikelihood: zero output at layer " +
                                   std::to_string(l));
    }
    model.log_norm_gains.push_back(std::log(sel.norm_gain));
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = sel.output[i] / sel.norm_gain;
    model.layers.push_back(std::move(sel.matrix));
    model.anchor_trace.push_back(cur);
  }
  return model;
}

namespace detail {

// y = layer * x with the same per-row summation order as the scoring pass.
inline void apply_layer(const std::vector<double>& layer, const RealVector& x,
                        RealVector& y) {
  const std::size_t k = x.size();
  for (std::size_t r = 0; r < k; ++r) {
    const double* row = layer.data() + r * k;
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += row[j] * x[j];
    y[r] = s;
  }
}

}  // namespace detail

// Forward pass through the first `upto` layers with per-layer renormalization;
// records every intermediate unit vector and log gain.
inline LayerTrace forward_traced_upto(const LinearModel& model, const RealVector& w_prime,
                                      std::size_t upto, std::string sample_id = {}) {
  if (w_prime.size() != model.dim()) {
    throw std::invalid_argument("forward: dimension mismatch");
  }
  if (upto < 1 || upto > model.depth()) throw std::domain_error("forward: layer out of range");
  check_usable(w_prime, "forward");

  LayerTrace trace;
  trace.sample_id = std::move(sample_id);
  trace.per_layer.reserve(upto);
  trace.log_norm_gains.reserve(upto);
  RealVector cur = normalized(w_prime);
  RealVector next(cur.size());
  for (std::size_t l = 0; l < upto; ++l) {
    detail::apply_layer(model.layers[l], cur, next);
    const double gain = norm(next);
    if (gain == 0.0) {
      throw degenerate_input_error("forward: zero output at layer " + std::to_string(l + 1));
    }
    trace.log_norm_gains.push_back(std::log(gain));
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = next[i] / gain;
    trace.per_layer.push_back(cur);
  }
  return trace;
}

inline LayerTrace forward_traced(const LinearModel& model, const RealVector& w_prime,
                                 std::string sample_id = {}) {
  return forward_traced_upto(model, w_prime, model.depth(), std::move(sample_id));
}

// Normalized G_L ... G_1 w'. Per-layer renormalization only rescales, so this
// equals the normalized unscaled product.
inline RealVector forward_full(const LinearModel& model, const RealVector& w_prime) {
  if (w_prime.size() != model.dim()) {
    throw std::invalid_argument("forward_full: dimension mismatch");
  }
  check_usable(w_prime, "forward_full");
  RealVector cur = normalized(w_prime);
  RealVector next(cur.size());
  for (std::size_t l = 0; l < model.depth(); ++l) {
    detail::apply_layer(model.layers[l], cur, next);
    const double gain = norm(next);
    if (gain == 0.0) {
      throw degenerate_input_error("forward_full: zero output at layer " +
                                   std::to_string(l + 1));
    }
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = next[i] / gain;
  }
  return cur;
}

}  // namespace wormhole
