#pragma once

// Flipped-label classification: score unseen images by their angle to the
// learned anchor feature and quantify the separation between non-flipped and
// flipped score distributions with the decidability index d'.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wormhole/likelihood.hpp"
#include "wormhole/maxlik.hpp"
#include "wormhole/parallel.hpp"
#include "wormhole/stats.hpp"

namespace wormhole {

inline RealVector flip_sign(RealVector image) {
  for (double& px : image) px = -px;
  return image;
}

// Angle fraction between the anchor output and the forwarded test image.
inline double angle_score(const LinearModel& model, const RealVector& test) {
  const RealVector out = forward_full(model, test);
  return angle_fraction(model.anchor_output(), out);
}

struct DecidabilityReport {
  double mu1 = 0.0;     // non-flipped score mean
  double mu2 = 0.0;     // flipped score mean
  double sigma1 = 0.0;  // population standard deviations
  double sigma2 = 0.0;
  double d_prime = 0.0;
  std::size_t depth = 0;
  std::vector<double> scores_nonflipped;
  std::vector<double> scores_flipped;
};

// d' = |mu1-mu2| / sqrt((sigma1^2 + sigma2^2)/2); when both sigmas vanish the
// report carries +inf for distinct means and 0 for equal ones.
inline double decidability_index(double mu1, double mu2, double sigma1, double sigma2) {
  const double pooled = std::sqrt(0.5 * (sigma1 * sigma1 + sigma2 * sigma2));
  if (pooled == 0.0) {
    return mu1 == mu2 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::fabs(mu1 - mu2) / pooled;
}

// Trains on the anchor image at the deepest requested depth; row streams are
// keyed by (seed, layer, row), so layer l of that model is exactly the model
// of depth l and every requested depth is scored from one traced pass.
inline std::vector<DecidabilityReport> flipped_label_experiment(
    const RealVector& anchor_image, const std::vector<RealVector>& tests,
    NetConfig cfg, const std::vector<std::size_t>& depths, unsigned threads = 1) {
  if (tests.empty()) throw std::domain_error("flipped_label_experiment: empty test set");
  if (depths.empty()) throw std::domain_error("flipped_label_experiment: empty depth list");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 1) throw std::domain_error("flipped_label_experiment: depth must be >= 1");
    if (i > 0 && depths[i] <= depths[i - 1]) {
      throw std::domain_error("flipped_label_experiment: depths must ascend");
    }
  }
  cfg.depth = depths.back();
  const LinearModel model = train_maxlikelihood(anchor_image, cfg, threads);

  const std::size_t n = tests.size();
  std::vector<std::vector<double>> nf(depths.size(), std::vector<double>(n));
  std::vector<std::vector<double>> fl(depths.size(), std::vector<double>(n));
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      const LayerTrace pos = forward_traced(model, tests[i]);
      const LayerTrace neg = forward_traced(model, flip_sign(tests[i]));
      for (std::size_t d = 0; d < depths.size(); ++d) {
        const std::size_t l = depths[d];
        nf[d][i] = angle_fraction(model.anchor_trace[l - 1], pos.per_layer[l - 1]);
        fl[d][i] = angle_fraction(model.anchor_trace[l - 1], neg.per_layer[l - 1]);
      }
    }
  });

  std::vector<DecidabilityReport> reports(depths.size());
  for (std::size_t d = 0; d < depths.size(); ++d) {
    DecidabilityReport& r = reports[d];
    r.depth = depths[d];
    r.scores_nonflipped = std::move(nf[d]);
    r.scores_flipped = std::move(fl[d]);
    const auto m1 = mean_stddev(r.scores_nonflipped);
    const auto m2 = mean_stddev(r.scores_flipped);
    r.mu1 = m1.mean;
    r.sigma1 = m1.stddev;
    r.mu2 = m2.mean;
    r.sigma2 = m2.stddev;
    r.d_prime = decidability_index(r.mu1, r.mu2, r.sigma1, r.sigma2);
  }
  return reports;
}

}  // namespace wormhole
