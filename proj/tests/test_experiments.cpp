#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "covfield/experiments.hpp"

using namespace covfield;

TEST(PowerFit, RecoversExactPowerLaws) {
  const std::vector<long> n{10, 100, 1000, 10000};
  std::vector<double> y, z;
  for (long v : n) {
    y.push_back(3.0 * std::pow(static_cast<double>(v), -0.5));
    z.push_back(2.0 * std::pow(std::log(static_cast<double>(v)), 0.75) * std::pow(static_cast<double>(v), -0.4));
  }
  const auto a = fit_power(n, y, 0.0);
  EXPECT_NEAR(a.exponent, -0.5, 1e-12);
  EXPECT_NEAR(a.constant, 3.0, 1e-10);
  EXPECT_NEAR(a.rms_residual, 0.0, 1e-12);
  const auto b = fit_power(n, z, 0.75);
  EXPECT_NEAR(b.exponent, -0.4, 1e-12);
  EXPECT_NEAR(b.constant, 2.0, 1e-10);
  EXPECT_THROW(fit_power({10}, {1.0}, 0.0), std::invalid_argument);
}

TEST(Converge, ErrorShrinksWithSampleSize) {
  ConvergeConfig cfg;
  cfg.grid = 12;
  cfg.replicates = 6;
  cfg.n_values = {50, 5000};
  const auto rep = run_converge(cfg);
  ASSERT_EQ(rep.mean_errors.size(), 2u);
  EXPECT_TRUE(rep.monotone);
  EXPECT_LT(rep.mean_errors[1], 0.3 * rep.mean_errors[0]);
  EXPECT_EQ(rep.replicate_errors[0].size(), 6u);
  // Same seed, same numbers.
  EXPECT_EQ(run_converge(cfg).mean_errors, rep.mean_errors);
}

TEST(Converge, RejectsBadLadders) {
  ConvergeConfig cfg;
  cfg.n_values = {};
  EXPECT_THROW(run_converge(cfg), std::invalid_argument);
  cfg.n_values = {1, 10};
  EXPECT_THROW(run_converge(cfg), std::invalid_argument);
}

TEST(Pipeline, SeparatedSegmentsAreRecovered) {
  // Two far-apart segments: at γ > 0 the top cut separates them.
  std::vector<LineSpec> lines(2);
  lines[0] = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 40};
  lines[1] = {Eigen::Vector2d(0, 5), Eigen::Vector2d(1, 6), 40};
  BoundingBox box{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 6)};
  const auto ds = gen_line_arrangement(lines, 0.0, 0, box, 1);
  PipelineParams p;
  p.sigma = 0.2;
  p.gamma = 1.0;
  p.top_k = 2;
  p.cutoff_offset = 0.0;
  const auto a = cluster_pipeline(ds.measure.atoms, p);
  EXPECT_EQ(a.k, 2);
  EXPECT_EQ(score(a.labels, ds.labels), 0.0);
}

TEST(Benchmark, RunsOnSmallSuite) {
  const auto train = gen_arrangement_suite(ArrangementKind::lines2d, 2, 1);
  const auto test = gen_arrangement_suite(ArrangementKind::lines2d, 2, 2);
  BenchmarkConfig cfg;
  cfg.sigmas = {0.1};
  cfg.gammas = {0.0, 0.01};
  cfg.cutoff_steps = 5;
  const auto r = run_cluster_benchmark(train, test, cfg);
  ASSERT_EQ(r.test_errors.size(), 2u);
  EXPECT_GE(r.average_error, 0.0);
  EXPECT_LE(r.average_error, 1.0);
  EXPECT_NEAR(r.median_error, 0.5 * (r.test_errors[0] + r.test_errors[1]), 1e-15);
  EXPECT_DOUBLE_EQ(r.sigma, 0.1);
  cfg.sigmas.clear();
  EXPECT_THROW(run_cluster_benchmark(train, test, cfg), std::invalid_argument);
}

TEST(NoisyLines, DatasetShape) {
  const auto cfg = default_noisy_lines();
  const auto ds = noisy_lines_dataset(cfg, 5);
  EXPECT_EQ(ds.measure.size(), 3 * 200 + 180);
  int outliers = 0;
  for (int l : ds.labels) outliers += l == kOutlierLabel;
  EXPECT_EQ(outliers, 180);
}

TEST(NoisyLines, PcaDirection) {
  Eigen::MatrixXd pts(2, 5);
  for (int i = 0; i < 5; ++i) pts.col(i) << 1 + 2.0 * i, -1 + 1.0 * i;
  const auto f = pca_line(pts);
  EXPECT_NEAR(std::abs(f.direction.dot(Eigen::Vector2d(2, 1).normalized())), 1.0, 1e-12);
  EXPECT_NEAR(f.centroid.x(), 5.0, 1e-12);
  EXPECT_EQ(f.size, 5);
}
