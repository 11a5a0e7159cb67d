#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace wormhole {

// Fixed-order pairwise summation; the result depends only on element order,
// never on thread count or chunking of the producer.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

struct MeanStddev {
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by N)
};

// Two-pass mean/stddev for a deterministic reduction order.
inline MeanStddev mean_stddev(std::span<const double> xs) {
  MeanStddev out;
  if (xs.empty()) return out;
  out.mean = mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - out.mean;
    sq[i] = d * d;
  }
  out.stddev = std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size()));
  return out;
}

// Ranks with ties assigned their average rank (1-based).
inline std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) return 0.0;
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct Histogram {
  std::vector<double> edges;       // bins + 1 entries
  std::vector<std::size_t> counts; // per bin; final bin closed on the right
};

inline Histogram histogram(std::span<const double> xs, double lo, double hi,
                           std::size_t bins) {
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  for (double x : xs) {
    if (x < lo || x > hi) continue;
    std::size_t b = static_cast<std::size_t>((x - lo) / width);
    if (b >= bins) b = bins - 1;
    h.counts[b]++;
  }
  return h;
}

}  // namespace wormhole
