#pragma once

// Clustering via memorization: per-layer side-of-anchor labels giving 2L
// clusters, the standard cluster quality metrics, Lloyd k-means for
// validation, and a deterministic power-iteration PCA for plot export.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wormhole/maxlik.hpp"
#include "wormhole/parallel.hpp"
#include "wormhole/rng.hpp"
#include "wormhole/stats.hpp"
#include "wormhole/vec.hpp"

namespace wormhole {

struct ClusterAssignment {
  std::vector<RealVector> points;          // unit layer outputs
  std::vector<int> labels;                 // 2*(layer-1) + side
  std::vector<std::size_t> layer_of_point; // 1-based layer
  std::size_t skipped = 0;                 // degenerate samples dropped
};

// Labels N test samples per layer by the sign of the dot product with the
// anchor trajectory at that layer: side 0 when w'_l . w_l >= 0, else 1.
inline ClusterAssignment build_trajectory_clusters(
    const LinearModel& model, const std::vector<std::vector<RealVector>>& layer_sets,
    unsigned threads = 1) {
  if (layer_sets.size() != model.depth()) {
    throw std::invalid_argument("build_trajectory_clusters: need one test set per layer");
  }
  for (const auto& set : layer_sets) {
    if (set.empty()) throw std::domain_error("build_trajectory_clusters: empty layer set");
  }
  ClusterAssignment out;
  for (std::size_t l = 1; l <= layer_sets.size(); ++l) {
    const auto& set = layer_sets[l - 1];
    std::vector<RealVector> layer_points(set.size());
    std::vector<char> ok(set.size(), 0);
    parallel_chunks(set.size(), threads,
                    [&](std::size_t begin, std::size_t end, std::size_t) {
                      for (std::size_t i = begin; i < end; ++i) {
                        try {
                          LayerTrace t = forward_traced_upto(model, set[i], l);
                          layer_points[i] = std::move(t.per_layer[l - 1]);
                          ok[i] = 1;
                        } catch (const degenerate_input_error&) {
                          ok[i] = 0;
                        }
                      }
                    });
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!ok[i]) {
        ++out.skipped;
        continue;
      }
      const int side = dot(layer_points[i], model.anchor_trace[l - 1]) >= 0.0 ? 0 : 1;
      out.labels.push_back(2 * static_cast<int>(l - 1) + side);
      out.layer_of_point.push_back(l);
      out.points.push_back(std::move(layer_points[i]));
    }
  }
  return out;
}

struct ClusterMetrics {
  double silhouette = 0.0;
  double davies_bouldin = 0.0;
  double inter_cluster = 0.0;  // min pairwise centroid distance
  double intra_cluster = 0.0;  // mean point-to-own-centroid distance
};

namespace detail {

struct ClusterIndex {
  std::vector<int> ids;                        // distinct labels, ascending
  std::vector<std::vector<std::size_t>> member;// per cluster, point indices
  std::vector<RealVector> centroid;
};

inline ClusterIndex index_clusters(const std::vector<RealVector>& points,
                                   const std::vector<int>& labels) {
  ClusterIndex idx;
  idx.ids = labels;
  std::sort(idx.ids.begin(), idx.ids.end());
  idx.ids.erase(std::unique(idx.ids.begin(), idx.ids.end()), idx.ids.end());
  idx.member.resize(idx.ids.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto at = std::lower_bound(idx.ids.begin(), idx.ids.end(), labels[i]);
    idx.member[static_cast<std::size_t>(at - idx.ids.begin())].push_back(i);
  }
  idx.centroid.assign(idx.ids.size(), RealVector(points[0].size(), 0.0));
  for (std::size_t c = 0; c < idx.ids.size(); ++c) {
    for (std::size_t i : idx.member[c]) axpy(1.0, points[i], idx.centroid[c]);
    const double inv = 1.0 / static_cast<double>(idx.member[c].size());
    for (double& v : idx.centroid[c]) v *= inv;
  }
  return idx;
}

}  // namespace detail

// Standard definitions on Euclidean distances. Singleton clusters contribute
// silhouette 0.
inline ClusterMetrics clustering_report(const std::vector<RealVector>& points,
                                        const std::vector<int>& labels) {
  if (points.size() != labels.size() || points.empty()) {
    throw std::invalid_argument("clustering_report: points/labels size mismatch");
  }
  const auto idx = detail::index_clusters(points, labels);
  const std::size_t n_clusters = idx.ids.size();
  if (n_clusters < 2) throw std::domain_error("clustering_report: need >= 2 clusters");

  std::vector<std::size_t> cluster_of(points.size());
  for (std::size_t c = 0; c < n_clusters; ++c) {
    for (std::size_t i : idx.member[c]) cluster_of[i] = c;
  }

  ClusterMetrics m;

  std::vector<double> sil(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t own = cluster_of[i];
    if (idx.member[own].size() <= 1) continue;  // singleton contributes 0
    double a = 0.0;
    for (std::size_t j : idx.member[own]) {
      if (j != i) a += distance(points[i], points[j]);
    }
    a /= static_cast<double>(idx.member[own].size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (c == own) continue;
      double d = 0.0;
      for (std::size_t j : idx.member[c]) d += distance(points[i], points[j]);
      b = std::min(b, d / static_cast<double>(idx.member[c].size()));
    }
    const double denom = std::max(a, b);
    sil[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  m.silhouette = mean(sil);

  std::vector<double> scatter(n_clusters, 0.0);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    double s = 0.0;
    for (std::size_t i : idx.member[c]) s += distance(points[i], idx.centroid[c]);
    scatter[c] = s / static_cast<double>(idx.member[c].size());
  }

  double dbi = 0.0;
  double min_centroid_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_clusters; ++c) {
    double worst = 0.0;
    for (std::size_t d = 0; d < n_clusters; ++d) {
      if (c == d) continue;
      const double cd = distance(idx.centroid[c], idx.centroid[d]);
      if (d > c) min_centroid_dist = std::min(min_centroid_dist, cd);
      worst = std::max(worst, (scatter[c] + scatter[d]) / cd);
    }
    dbi += worst;
  }
  m.davies_bouldin = dbi / static_cast<double>(n_clusters);
  m.inter_cluster = min_centroid_dist;

  std::vector<double> own_dist(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    own_dist[i] = distance(points[i], idx.centroid[cluster_of[i]]);
  }
  m.intra_cluster = mean(own_dist);
  return m;
}

inline ClusterMetrics clustering_report(const ClusterAssignment& assignment) {
  return clustering_report(assignment.points, assignment.labels);
}

struct KMeansResult {
  std::vector<int> labels;
  std::vector<RealVector> centroids;
  std::size_t iterations = 0;
};

inline double kmeans_inertia(const std::vector<RealVector>& points,
                             const std::vector<int>& labels,
                             const std::vector<RealVector>& centroids) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    s += d * d;
  }
  return s;
}

// Lloyd iterations from explicit initial centroids. Nearest-centroid ties go
// to the lowest centroid index; empty clusters are re-seeded with the point
// farthest from its current centroid.
inline KMeansResult kmeans_lloyd_from(const std::vector<RealVector>& points,
                                      std::vector<RealVector> centroids,
                                      std::size_t max_iters = 100) {
  const std::size_t K = centroids.size();
  KMeansResult res;
  res.centroids = std::move(centroids);
  res.labels.assign(points.size(), 0);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (std::size_t c = 0; c < K; ++c) {
        const double d = distance(points[i], res.centroids[c]);
        if (d < best) {
          best = d;
          best_c = static_cast<int>(c);
        }
      }
      if (res.labels[i] != best_c) {
        res.labels[i] = best_c;
        changed = true;
      }
    }
    res.iterations = iter + 1;
    if (!changed) break;

    std::vector<std::size_t> count(K, 0);
    std::vector<RealVector> sums(K, RealVector(points[0].size(), 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
      axpy(1.0, points[i], sums[static_cast<std::size_t>(res.labels[i])]);
      count[static_cast<std::size_t>(res.labels[i])]++;
    }
    for (std::size_t c = 0; c < K; ++c) {
      if (count[c] == 0) {
        // farthest point from its assigned centroid takes over this cluster
        double far_d = -1.0;
        std::size_t far_i = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const double d =
              distance(points[i], res.centroids[static_cast<std::size_t>(res.labels[i])]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        if (far_d <= 0.0) continue;
        res.centroids[c] = points[far_i];
        res.labels[far_i] = static_cast<int>(c);
        continue;
      }
      const double inv = 1.0 / static_cast<double>(count[c]);
      for (std::size_t j = 0; j < sums[c].size(); ++j) res.centroids[c][j] = sums[c][j] * inv;
    }
  }
  return res;
}

// Seeded init: walk a deterministic permutation of the points, keeping the
// first K pairwise-distinct ones as centroids.
inline KMeansResult kmeans_lloyd(const std::vector<RealVector>& points, std::size_t K,
                                 std::uint64_t seed, std::size_t max_iters = 100) {
  if (K > points.size()) {
    throw std::domain_error("kmeans_lloyd: K exceeds point count");
  }
  if (K == 0) throw std::domain_error("kmeans_lloyd: K must be >= 1");
  std::vector<std::size_t> perm(points.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) {
    const std::uint64_t r = rng::next_u64(seed, rng::kShuffle, 0, 0,
                                          static_cast<std::uint32_t>(i));
    std::swap(perm[i - 1], perm[r % i]);
  }
  std::vector<RealVector> init;
  for (std::size_t i : perm) {
    if (init.size() == K) break;
    bool dup = false;
    for (const auto& c : init) dup = dup || c == points[i];
    if (!dup) init.push_back(points[i]);
  }
  for (std::size_t i : perm) {
    if (init.size() == K) break;  // fewer distinct points than K: allow repeats
    init.push_back(points[i]);
  }
  return kmeans_lloyd_from(points, std::move(init), max_iters);
}

struct PcaResult {
  std::vector<RealVector> coords;      // M x out_dim projections
  std::vector<RealVector> components;  // out_dim unit directions
  std::vector<double> eigenvalues;     // covariance eigenvalues, descending
  bool rank_deficient = false;
};

// Mean-centered projection onto the top principal directions, computed by
// power iteration with deflation (tolerance 1e-10, at most 10000 iterations).
// Deterministic start vector and sign convention (first coordinate of each
// direction with |x| > 1e-12 made positive).
inline PcaResult pca_project(const std::vector<RealVector>& points, std::size_t out_dim) {
  if (out_dim < 1) throw std::domain_error("pca_project: out_dim must be >= 1");
  if (points.size() < out_dim) {
    throw std::domain_error("pca_project: need at least out_dim points");
  }
  const std::size_t m = points.size();
  const std::size_t k = points[0].size();

  RealVector center(k, 0.0);
  for (const auto& p : points) axpy(1.0, p, center);
  for (double& v : center) v /= static_cast<double>(m);
  std::vector<RealVector> x(m, RealVector(k));
  for (std::size_t i = 0; i < m; ++i) x[i] = sub(points[i], center);

  std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
  for (const auto& row : x) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) cov[a][b] += row[a] * row[b];
    }
  }
  const double inv = m > 1 ? 1.0 / static_cast<double>(m - 1) : 1.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      cov[a][b] *= inv;
      cov[b][a] = cov[a][b];
    }
  }

  PcaResult res;
  double top_eigenvalue = 0.0;
  for (std::size_t comp = 0; comp < out_dim; ++comp) {
    RealVector v(k);
    for (std::size_t j = 0; j < k; ++j) v[j] = 1.0 / static_cast<double>(j + 1);
    v = normalized(v);
    double lambda = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
      RealVector next(k, 0.0);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) next[a] += cov[a][b] * v[b];
      }
      lambda = norm(next);
      if (lambda == 0.0) break;
      for (double& val : next) val /= lambda;
      const double drift = std::min(distance(next, v), distance(next, scaled(v, -1.0)));
      v = next;
      if (drift < 1e-10) break;
    }
    if (lambda == 0.0 || (comp > 0 && lambda <= 1e-12 * top_eigenvalue)) {
      res.rank_deficient = true;
      break;
    }
    if (comp == 0) top_eigenvalue = lambda;
    for (std::size_t j = 0; j < k; ++j) {
      if (std::fabs(v[j]) > 1e-12) {
        if (v[j] < 0.0) v = scaled(v, -1.0);
        break;
      }
    }
    res.components.push_back(v);
    res.eigenvalues.push_back(lambda);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) cov[a][b] -= lambda * v[a] * v[b];
    }
  }

  res.coords.assign(m, RealVector(res.components.size()));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < res.components.size(); ++c) {
      res.coords[i][c] = dot(x[i], res.components[c]);
    }
  }
  return res;
}

}  // namespace wormhole
