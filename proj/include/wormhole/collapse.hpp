#pragma once

// Convergence experiments: the per-sample loss 1 - theta0(w_L, w'_L), the
// bimodal collapse statistics, negative log-likelihood sweeps over (n, L)
// grids, and feature-matrix export for external projection tools.

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "wormhole/csv.hpp"
#include "wormhole/dataset.hpp"
#include "wormhole/likelihood.hpp"
#include "wormhole/maxlik.hpp"
#include "wormhole/parallel.hpp"
#include "wormhole/stats.hpp"

namespace wormhole {

struct CollapseReport {
  std::vector<double> per_sample_loss;    // 1 - theta0 per test sample
  double mean_anti_loss = 0.0;            // mean loss over the loss < 0.5 group
  double mean_corr_loss = 0.0;            // mean theta0 over the loss >= 0.5 group
  double bimodality_mass = 0.0;           // fraction within tol of {0, 1}
  double tol = 0.0;
  std::array<std::size_t, 2> group_sizes{0, 0};  // {anti-correlated, correlated}
};

// Forwards every test to the final layer and splits the losses at the 0.5
// boundary; exact 0.5 goes to the correlated group. Per-sample work runs in
// index-sliced chunks and all reductions happen in index order afterwards, so
// the report does not depend on the thread count.
inline CollapseReport collapse_experiment(const LinearModel& model,
                                          const std::vector<RealVector>& tests,
                                          double tol, unsigned threads = 1) {
  if (tests.empty()) throw std::domain_error("collapse_experiment: empty test set");
  if (!(tol > 0.0 && tol < 0.5)) {
    throw std::domain_error("collapse_experiment: tol must lie in (0, 0.5)");
  }
  CollapseReport report;
  report.tol = tol;
  report.per_sample_loss.resize(tests.size());
  parallel_chunks(tests.size(), threads,
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t i = begin; i < end; ++i) {
                      const RealVector out = forward_full(model, tests[i]);
                      const double theta = angle_fraction(model.anchor_output(), out);
                      report.per_sample_loss[i] = 1.0 - theta;
                    }
                  });

  std::vector<double> anti, corr_theta;
  std::size_t near_pole = 0;
  for (double loss : report.per_sample_loss) {
    if (loss < 0.5) {
      anti.push_back(loss);
    } else {
      corr_theta.push_back(1.0 - loss);
    }
    if (std::min(loss, 1.0 - loss) <= tol) ++near_pole;
  }
  report.group_sizes = {anti.size(), corr_theta.size()};
  report.mean_anti_loss = mean(anti);
  report.mean_corr_loss = mean(corr_theta);
  report.bimodality_mass =
      static_cast<double>(near_pole) / static_cast<double>(tests.size());
  return report;
}

struct SweepGrid {
  std::vector<std::size_t> widths;
  std::vector<std::size_t> depths;
  std::vector<double> nll_matrix;        // |widths| x |depths|, widths-major
  std::vector<double> runtime_per_cell;  // seconds, same layout
};

// Mean final-layer H2(min(theta, 1-theta)) per (n, L) cell. Within one width
// the models are nested (row streams are keyed by (seed, layer, row)), so one
// incremental pass over layers yields every depth cell exactly as if each had
// been trained from scratch.
inline SweepGrid nll_sweep(const RealVector& anchor, const std::vector<std::size_t>& widths,
                           const std::vector<std::size_t>& depths, std::size_t test_count,
                           std::uint64_t seed, unsigned threads = 1) {
  if (widths.empty() || depths.empty()) {
    throw std::domain_error("nll_sweep: widths and depths must be nonempty");
  }
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (widths[i] <= widths[i - 1]) throw std::domain_error("nll_sweep: widths must ascend");
  }
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) throw std::domain_error("nll_sweep: depths must ascend");
  }
  check_usable(anchor, "nll_sweep");
  const std::size_t k = anchor.size();
  const std::vector<RealVector> tests = gaussian_samples(test_count, k, seed);

  SweepGrid grid;
  grid.widths = widths;
  grid.depths = depths;
  grid.nll_matrix.assign(widths.size() * depths.size(), 0.0);
  grid.runtime_per_cell.assign(widths.size() * depths.size(), 0.0);

  using clock = std::chrono::steady_clock;
  for (std::size_t wi = 0; wi < widths.size(); ++wi) {
    auto cell_start = clock::now();
    RealVector anchor_cur = normalized(anchor);
    std::vector<RealVector> test_cur(tests.size());
    for (std::size_t i = 0; i < tests.size(); ++i) test_cur[i] = normalized(tests[i]);

    std::size_t di = 0;
    for (std::size_t l = 1; l <= depths.back() && di < depths.size(); ++l) {
      RowSelection sel = row_topk_select(anchor_cur, widths[wi], seed,
                                         static_cast<std::uint32_t>(l), threads);
      for (std::size_t i = 0; i < anchor_cur.size(); ++i) {
        anchor_cur[i] = sel.output[i] / sel.norm_gain;
      }
      parallel_chunks(tests.size(), threads,
                      [&](std::size_t begin, std::size_t end, std::size_t) {
                        RealVector next(k);
                        for (std::size_t i = begin; i < end; ++i) {
                          detail::apply_layer(sel.matrix, test_cur[i], next);
                          const double gain = norm(next);
                          if (gain == 0.0) {
                            throw degenerate_input_error(
                                "nll_sweep: zero output at layer " + std::to_string(l));
                          }
                          for (std::size_t j = 0; j < k; ++j) test_cur[i][j] = next[j] / gain;
                        }
                      });
      if (l == depths[di]) {
        std::vector<double> h2s(tests.size());
        for (std::size_t i = 0; i < tests.size(); ++i) {
          const double theta = angle_fraction(anchor_cur, test_cur[i]);
          h2s[i] = h2(std::min(theta, 1.0 - theta));
        }
        const std::size_t cell = wi * depths.size() + di;
        grid.nll_matrix[cell] = mean(h2s);
        grid.runtime_per_cell[cell] =
            std::chrono::duration<double>(clock::now() - cell_start).count();
        cell_start = clock::now();
        ++di;
      }
    }
  }
  return grid;
}

// Writes one row per (sample, layer): sample_id, layer, k coordinates of the
// normalized output. The anchor trajectory is exported as sample "anchor",
// tests as "t0", "t1", ... Layer 0 selects all layers.
inline void export_features(const LinearModel& model, const std::vector<RealVector>& tests,
                            std::size_t layer, const std::string& path) {
  if (layer > model.depth()) throw std::domain_error("export_features: layer out of range");
  CsvWriter csv(path);
  std::vector<std::string> header = {"sample_id", "layer"};
  for (std::size_t j = 0; j < model.dim(); ++j) header.push_back("f" + std::to_string(j));
  csv.row(header);

  auto emit = [&](const std::string& id, const std::vector<RealVector>& per_layer) {
    for (std::size_t l = 1; l <= per_layer.size(); ++l) {
      if (layer != 0 && l != layer) continue;
      std::vector<std::string> cells = {id, std::to_string(l)};
      for (double v : per_layer[l - 1]) cells.push_back(format_real(v));
      csv.row(cells);
    }
  };

  emit("anchor", model.anchor_trace);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const LayerTrace trace = forward_traced(model, tests[i]);
    emit("t" + std::to_string(i), trace.per_layer);
  }
}

}  // namespace wormhole
