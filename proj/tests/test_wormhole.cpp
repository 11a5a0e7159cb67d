#include "wormhole/wormhole.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "wormhole/dataset.hpp"
#include "wormhole/stats.hpp"

using wormhole::gaussian_samples;
using wormhole::generate_fooling;
using wormhole::NetConfig;
using wormhole::RealVector;
using wormhole::reconcile;
using wormhole::reconciliation_experiment;
using wormhole::wormhole_distance;

namespace {

wormhole::LinearModel small_model(std::size_t depth = 4, std::uint64_t seed = 3) {
  const auto w = gaussian_samples(1, 6, seed)[0];
  return wormhole::train_maxlikelihood(w, NetConfig{6, 128, depth, seed, 1.0});
}

}  // namespace

TEST(WormholeDistance, PolesOfTheTwoBranches) {
  const auto model = small_model();
  const auto w = gaussian_samples(1, 6, 3)[0];
  const auto anti = wormhole_distance(model, w, wormhole::scaled(w, -1.0), 10.0);
  EXPECT_DOUBLE_EQ(anti.distance, 0.0);
  const auto corr = wormhole_distance(model, w, w, 10.0);
  EXPECT_NEAR(corr.distance, 20.0, 1e-12);
  EXPECT_EQ(anti.point_p.size(), 7u);
  EXPECT_DOUBLE_EQ(anti.point_p[0], 0.0);
  EXPECT_THROW(wormhole_distance(model, w, w, 0.0), std::domain_error);
}

TEST(WormholeDistance, MatchesEtaScaledUnitSum) {
  const auto model = small_model();
  const auto vecs = gaussian_samples(2, 6, 9);
  const double eta = 1e4;
  const auto pair = wormhole_distance(model, vecs[0], vecs[1], eta);
  const auto u = wormhole::forward_full(model, vecs[0]);
  const auto v = wormhole::forward_full(model, vecs[1]);
  EXPECT_NEAR(pair.distance, eta * wormhole::norm(wormhole::add(u, v)), 1e-12 * eta);
}

TEST(GenerateFooling, ExactPerturbationNorm) {
  const auto model = small_model();
  const auto p = gaussian_samples(1, 6, 77)[0];
  EXPECT_EQ(generate_fooling(model, p, 0.0), p);
  for (double eta : {1.0, 10.0, 10000.0}) {
    const auto z = generate_fooling(model, p, eta);
    EXPECT_NEAR(wormhole::distance(z, p), eta, 1e-9 * eta);
  }
  EXPECT_THROW(generate_fooling(model, gaussian_samples(1, 5, 1)[0], 1.0),
               std::invalid_argument);
}

TEST(GenerateFooling, LargeEtaDestroysSignal) {
  const auto imgs = wormhole::synthetic_digit_images(1, 5, 3);
  const auto w = gaussian_samples(1, 784, 15)[0];
  const auto model = wormhole::train_maxlikelihood(w, NetConfig{784, 2048, 4, 15, 1.0});
  const double eta = 10000.0;
  const auto z = generate_fooling(model, imgs.images[0], eta);
  EXPECT_LT(wormhole::norm(imgs.images[0]) / eta, 0.002);
  EXPECT_GT(wormhole::norm(z), 0.99 * eta);
}

TEST(Reconcile, FixedPointWhenBranchesCoincide) {
  const auto model = small_model();
  const auto w_anchor = gaussian_samples(1, 6, 3)[0];
  const auto p = gaussian_samples(1, 6, 55)[0];
  const double eta = 100.0;
  const auto z = generate_fooling(model, p, eta);
  // Reconciling with the anchor itself: u_hat' == w_hat_L exactly.
  const auto rec = reconcile(model, z, w_anchor, eta, p);
  EXPECT_EQ(rec.sign, 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(rec.random_label[i], p[i], 1e-9);
    EXPECT_NEAR(rec.reconstruction[i], p[i], 1e-9);
  }
  EXPECT_LT(rec.rel_error, 1e-12);
  EXPECT_LT(rec.wormhole_residual, 1e-12);
}

TEST(Reconcile, ExactAlgebraIdentities) {
  const auto model = small_model(5, 21);
  const auto vecs = gaussian_samples(3, 6, 31);
  const double eta = 1e4;
  const auto z = generate_fooling(model, vecs[0], eta);
  const auto rec = reconcile(model, z, vecs[1], eta, vecs[0]);

  // P_hat == z + eta w_hat_L regardless of w'.
  RealVector expect = z;
  wormhole::axpy(eta, model.anchor_output(), expect);
  for (std::size_t i = 0; i < expect.size(); ++i) {
    EXPECT_NEAR(rec.reconstruction[i], expect[i], 1e-9);
  }

  // ||P' - P|| == eta ||s u' - w_hat_L||.
  const auto u_prime = wormhole::forward_full(model, vecs[1]);
  RealVector diff = wormhole::scaled(u_prime, static_cast<double>(rec.sign));
  diff = wormhole::sub(diff, model.anchor_output());
  EXPECT_NEAR(wormhole::distance(rec.random_label, vecs[0]), eta * wormhole::norm(diff),
              1e-9 * eta);

  // Sign-corrected residual equals 2 sin(pi * min(theta, 1-theta) / 2).
  const double theta = wormhole::angle_fraction(u_prime, model.anchor_output());
  const double chord = 2.0 * std::sin(wormhole::kPi * std::min(theta, 1.0 - theta) / 2.0);
  EXPECT_NEAR(wormhole::norm(diff), chord, 1e-9);

  // The wormhole distance is the s = -1 branch of the residual.
  const auto pair = wormhole_distance(model, gaussian_samples(1, 6, 21)[0], vecs[1], eta);
  RealVector minus = wormhole::scaled(u_prime, -1.0);
  minus = wormhole::sub(minus, model.anchor_output());
  EXPECT_NEAR(pair.distance, eta * wormhole::norm(minus), 1e-12 * eta);
}

TEST(Reconcile, EtaZeroDegeneratesToIdentity) {
  const auto model = small_model();
  const auto p = gaussian_samples(1, 6, 41)[0];
  const auto z = generate_fooling(model, p, 0.0);
  const auto rec = reconcile(model, z, gaussian_samples(1, 6, 43)[0], 0.0, p);
  EXPECT_DOUBLE_EQ(rec.rel_error, 0.0);
  EXPECT_DOUBLE_EQ(rec.wormhole_residual, 0.0);
  EXPECT_THROW(reconcile(model, z, p, -1.0, p), std::domain_error);
}

TEST(Experiment, RecordsResidualTrendAndExports) {
  const auto digits = wormhole::synthetic_digit_images(2, 13);
  NetConfig cfg{784, 4096, 1, 99, 1.0};
  const std::vector<std::size_t> depths = {1, 2, 4, 8};
  const auto dir = testing::TempDir() + "/recon_test";
  std::filesystem::create_directories(dir);
  const auto records = reconciliation_experiment(digits, cfg, 1e4, depths, 2, dir);
  ASSERT_EQ(records.size(), 8u);

  for (int digit = 0; digit < 2; ++digit) {
    std::vector<double> res, dep;
    for (const auto& r : records) {
      if (r.digit != digit) continue;
      res.push_back(r.wormhole_residual);
      dep.push_back(static_cast<double>(r.depth));
      EXPECT_LT(r.rel_error, 1e-9);
    }
    ASSERT_EQ(res.size(), depths.size());
    EXPECT_LE(wormhole::spearman_rho(dep, res), -0.9) << "digit " << digit;
  }
  EXPECT_TRUE(std::filesystem::exists(dir + "/recon_d0_L8.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir + "/original_d1.csv"));
  const auto grid = wormhole::read_csv(dir + "/recon_d0_L8.csv");
  EXPECT_EQ(grid.size(), 28u);
  EXPECT_EQ(grid[0].size(), 28u);
  std::filesystem::remove_all(dir);
}

TEST(Experiment, EtaZeroGivesExactRecoveryAtEveryDepth) {
  const auto digits = wormhole::synthetic_digit_images(1, 17);
  NetConfig cfg{784, 1024, 1, 23, 1.0};
  const auto records = reconciliation_experiment(digits, cfg, 0.0, {1, 2});
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) {
    EXPECT_DOUBLE_EQ(r.rel_error, 0.0);
    EXPECT_DOUBLE_EQ(r.wormhole_residual, 0.0);
    EXPECT_EQ(r.fooling_example, r.meaningful_label);
  }
}

TEST(Experiment, ValidatesDepthsAndImages) {
  const auto digits = wormhole::synthetic_digit_images(1, 13);
  NetConfig cfg{784, 1024, 1, 1, 1.0};
  EXPECT_THROW(reconciliation_experiment(digits, cfg, 1.0, {}), wormhole::config_error);
  EXPECT_THROW(reconciliation_experiment(digits, cfg, 1.0, {0, 1}), wormhole::config_error);
  EXPECT_THROW(reconciliation_experiment(wormhole::ImageSet{}, cfg, 1.0, {1}),
               std::domain_error);
}
