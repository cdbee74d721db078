#pragma once

#include <vector>

#include <Eigen/Dense>

#include "covfield/kernel.hpp"
#include "covfield/measure.hpp"

namespace covfield {

/// Symmetric PSD d×d tensor Σ_α(x,σ).
using CovTensor = Eigen::MatrixXd;

/// Σ_α(x,σ) = Σ_i w_i (y_i−x)(y_i−x)ᵀ K(x,y_i,σ)
CovTensor ctf_at(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x, double sigma);

enum class Acceleration { exact, indexed };

struct FieldGrid {
  std::vector<Point> query_points;
  double sigma = 0.0;
  std::vector<CovTensor> tensors;
  std::vector<double> frechet_values;
};

/// Evaluates the field at every query point. Indexed mode uses a bucket grid
/// and is only available for compactly supported kernels.
FieldGrid ctf_grid(const WeightedMeasure& measure, const RadialKernel& kernel,
                   const std::vector<Point>& query_points, double sigma,
                   Acceleration acceleration = Acceleration::exact);

/// n×n lattice over [lo,hi]^2, row-major in y then x.
std::vector<Point> square_grid(double lo, double hi, int n);

struct SpectrumSummary {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns; first nonzero component positive
  double trace = 0.0;
  Eigen::VectorXd anisotropy_ratios;  // λ_i/λ_d for i < d, zero when λ_d = 0
};

SpectrumSummary spectrum(const CovTensor& t);

/// Number of eigenvalues with λ_i/λ_d above the threshold; 0 for a zero tensor.
int dimension_estimate(const SpectrumSummary& s, double threshold);

/// V_α(x,σ) = Σ_i w_i ‖y_i−x‖² K(x,y_i,σ), summed directly.
double frechet_value(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x, double sigma);

struct GradientMode {
  enum Kind { analytic_gaussian, central_difference } kind = analytic_gaussian;
  double h = 1e-5;

  static GradientMode analytic() { return {}; }
  static GradientMode difference(double step) { return {central_difference, step}; }
};

Eigen::VectorXd frechet_gradient(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x,
                                 double sigma, GradientMode mode = GradientMode::analytic());

/// Non-positive step and merge radius mean "derive from σ" (σ/10 and σ/100).
struct FlowParams {
  double initial_step = 0.0;
  double backtrack = 0.5;
  double tol = 1e-8;
  int max_iterations = 10000;
  double merge_radius = 0.0;
};

struct FlowResult {
  Point start;
  Point attractor;
  std::vector<Point> path;
  int basin_id = -1;
  bool converged = false;
  int iterations = 0;
};

/// Descends V along −∇V with a backtracking line search. A start that never
/// reaches ‖∇V‖ < tol·max(1,V) comes back with converged = false.
FlowResult flow_to_attractor(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& start,
                             double sigma, const FlowParams& params = {});

/// Basin ids per start: attractors closer than the merge radius share an id,
/// numbered in order of first appearance; non-converged flows get −1.
std::vector<int> basin_labels(const WeightedMeasure& measure, const RadialKernel& kernel,
                              const std::vector<Point>& starts, double sigma, const FlowParams& params = {},
                              std::vector<FlowResult>* flows = nullptr);

}  // namespace covfield
