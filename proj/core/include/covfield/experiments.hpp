#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covfield/cluster.hpp"
#include "covfield/measure.hpp"

namespace covfield {

// Convergence of the empirical field to the field of the uniform circle law.

struct ConvergeConfig {
  double radius = 1.0;
  double sigma = 0.6;
  int grid = 24;
  double lo = -1.5;
  double hi = 1.5;
  int replicates = 30;
  std::vector<long> n_values{10, 100, 1000, 10000, 100000};
  std::uint64_t seed = 1;
};

/// log ε = log C + p·log n + q·log ln n with q fixed by the model.
struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;
  double rms_residual = 0.0;  // in log space
};

struct ConvergenceReport {
  std::vector<long> n_values;
  std::vector<double> mean_errors;
  std::vector<std::vector<double>> replicate_errors;  // [n index][replicate]
  PowerFit pure_power;  // ε ≈ C n^p
  PowerFit log_power;   // ε ≈ C ln(n)^{3/4} n^p
  bool monotone = false;
};

/// Grid-max Frobenius error of one i.i.d. sample of size n.
double circle_sample_error(const ConvergeConfig& cfg, long n, std::uint64_t seed);
ConvergenceReport run_converge(const ConvergeConfig& cfg);
/// Least squares for log y = log C + p log x + log_power · log ln x.
PowerFit fit_power(const std::vector<long>& x, const std::vector<double>& y, double log_power);

// Clustering pipeline and benchmark harness.

struct PipelineParams {
  double sigma = 0.1;
  double gamma = 0.0;
  /// h = h₀ + cutoff_offset · sd, with h₀ the mean cophenetic distance.
  double cutoff_offset = 0.0;
  int top_k = 3;
  RadialKernel kernel = RadialKernel::gaussian();
};

/// Precomputed per-dataset structures shared across cutoff choices.
struct PreparedDataset {
  Eigen::MatrixXd metric;
  Dendrogram dendrogram;
  CopheneticStats stats;
};

PreparedDataset prepare(const Eigen::MatrixXd& points, double sigma, double gamma, const RadialKernel& kernel);
/// Cut at the offset height, then keep the top-k clusters when there are more.
ClusterAssignment cluster_prepared(const PreparedDataset& prep, double cutoff_offset, int top_k);
ClusterAssignment cluster_pipeline(const Eigen::MatrixXd& points, const PipelineParams& params);

struct BenchmarkConfig {
  std::vector<double> sigmas{0.05, 0.07, 0.1, 0.15};
  std::vector<double> gammas{0.0, 0.003, 0.01, 0.03};
  int cutoff_steps = 50;  // offsets evenly spaced on [−2, 2]
  int top_k = 3;
  RadialKernel kernel = RadialKernel::gaussian();
};

/// Defaults used for each arrangement kind (grids and k).
BenchmarkConfig default_benchmark_config(ArrangementKind kind);

struct BenchmarkResult {
  double sigma = 0.0;
  double gamma = 0.0;
  double cutoff_offset = 0.0;
  double train_error = 0.0;
  std::vector<double> test_errors;
  double average_error = 0.0;  // AE: mean over test samples
  double median_error = 0.0;   // ME read as the median over test samples
};

/// Grid search of (σ, γ, cutoff) minimizing mean training error, then scores
/// the test split with the chosen parameters.
BenchmarkResult run_cluster_benchmark(const std::vector<LabeledDataset>& train,
                                      const std::vector<LabeledDataset>& test, const BenchmarkConfig& cfg);

// Noisy three-line arrangement with outliers.

struct NoisyLinesConfig {
  std::vector<LineSpec> lines;  // empty: the default arrangement
  double noise_sd = 0.015;
  int n_outliers = 180;
  double sigma = 0.51;
  int n_clusters = 80;
  int top_k = 3;
  std::vector<double> gamma_grid{0.0, 0.001, 0.003, 0.01};
  int training_replicates = 4;
  std::uint64_t seed = 11;
  RadialKernel kernel = RadialKernel::gaussian();
};

struct FittedLine {
  Eigen::Vector2d centroid;
  Eigen::Vector2d direction;
  int size = 0;
};

struct NoisyLinesResult {
  double gamma = 0.0;
  std::vector<double> gamma_errors;  // mean training error per grid value
  std::vector<FittedLine> fitted;
  std::vector<double> angle_errors_deg;  // per generator, after optimal matching
  ClusterAssignment assignment;
  LabeledDataset data;
};

NoisyLinesConfig default_noisy_lines();
LabeledDataset noisy_lines_dataset(const NoisyLinesConfig& cfg, std::uint64_t seed);
/// Cut at m clusters, keep the top k and fit a line to each by PCA.
ClusterAssignment noisy_lines_cluster(const LabeledDataset& data, const NoisyLinesConfig& cfg, double gamma);
NoisyLinesResult run_noisy_lines(const NoisyLinesConfig& cfg);

/// Principal direction of a planar point set.
FittedLine pca_line(const Eigen::MatrixXd& points);

}  // namespace covfield
