#include "covfield/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covfield/parallel.hpp"

namespace covfield {

double sup_field_difference(const WeightedMeasure& alpha, const WeightedMeasure& beta, const RadialKernel& kernel,
                            double sigma, const std::vector<Point>& grid) {
  const auto fa = ctf_grid(alpha, kernel, grid, sigma);
  const auto fb = ctf_grid(beta, kernel, grid, sigma);
  double worst = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) worst = std::max(worst, (fa.tensors[q] - fb.tensors[q]).norm());
  return worst;
}

namespace {

void finish(StabilityReport& r) {
  r.slack = r.rhs - r.lhs;
  r.passed = r.lhs <= r.rhs + 1e-9 * r.rhs;
}

}  // namespace

StabilityReport check_stability_smooth(const WeightedMeasure& alpha, const WeightedMeasure& beta,
                                       const RadialKernel& kernel, double sigma, const std::vector<Point>& grid,
                                       const TransportOptions& opts) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
  const KernelConstants kc = derive_constants(kernel, alpha.dim);
  if (!kc.smooth_stability_eligible)
    throw std::invalid_argument("kernel '" + kernel.name() + "' has no finite A_f; use the truncation checker");
  StabilityReport r;
  r.theorem = "smooth";
  r.sigma = sigma;
  r.A_f = kc.A_f;
  r.distance = w1_exact(alpha, beta, opts).first;
  r.constant = sigma * kc.A_f / kc.C_d(sigma);
  r.rhs = r.constant * r.distance;
  r.lhs = sup_field_difference(alpha, beta, kernel, sigma, grid);
  finish(r);
  return r;
}

double truncation_stability_constant(double sigma, int d, double c) {
  if (!(sigma > 0) || !(c > 0) || d < 1) throw std::invalid_argument("need sigma > 0, c > 0, d ≥ 1");
  const double sc = sigma + c;
  const double sd = std::pow(sigma, d);
  const double dd = d;
  return dd / (dd + 2) * std::pow(sc, d + 2) / (c * sd) + (2 * sigma + c) * std::pow(sc, d) / sd +
         2 * dd / (dd + 2) * std::pow(sc, d + 2) / (c * sd);
}

StabilityReport check_stability_trunc(const WeightedMeasure& alpha, const WeightedMeasure& beta, double sigma,
                                      double diameter, std::optional<double> lambda,
                                      const std::vector<Point>& grid, bool heuristic,
                                      const TransportOptions& opts) {
  if (!lambda) throw std::invalid_argument("the truncation bound needs a density bound lambda");
  if (!(*lambda > 0)) throw std::invalid_argument("lambda must be positive");
  StabilityReport r;
  r.theorem = "truncation";
  r.sigma = sigma;
  r.lambda = lambda;
  r.diameter = diameter;
  r.heuristic = heuristic;
  r.distance = winf_exact(alpha, beta, opts).first;
  r.constant = *lambda * truncation_stability_constant(sigma, alpha.dim, diameter);
  r.rhs = r.constant * r.distance;
  r.lhs = sup_field_difference(alpha, beta, RadialKernel::truncation(), sigma, grid);
  finish(r);
  return r;
}

double radial_moment(double a, double b, int d) {
  if (!(a >= 0) || !(a < b) || d < 1) throw std::invalid_argument("need 0 ≤ a < b and d ≥ 1");
  return unit_sphere_area(d - 1) / (d + 2) * (std::pow(b, d + 2) - std::pow(a, d + 2));
}

double radial_moment_bound(double a, double b, double B, int d) {
  if (!(a >= 0) || !(a < b) || !(b <= B) || d < 1) throw std::invalid_argument("need 0 ≤ a < b ≤ B and d ≥ 1");
  return (b - a) * unit_sphere_area(d - 1) / (d + 2) * std::pow(B, d + 2) / (B - a);
}

Eigen::MatrixXd q_sigma(const RadialKernel& kernel, const Eigen::VectorXd& z, double sigma) {
  const ScaledKernel K(kernel, static_cast<int>(z.size()), sigma);
  return K.of_sq(z.squaredNorm()) * z * z.transpose();
}

double q_sigma_lipschitz(const KernelConstants& kc, double sigma) { return kc.A_f * sigma / kc.C_d(sigma); }

double z_uv(const RadialKernel& kernel, const Point& x, const Point& y, const Eigen::VectorXd& u,
            const Eigen::VectorXd& v, double sigma) {
  const Eigen::VectorXd diff = y - x;
  const ScaledKernel K(kernel, static_cast<int>(x.size()), sigma);
  return diff.dot(u) * diff.dot(v) * K.of_sq(diff.squaredNorm());
}

double z_uv_variance_bound(const KernelConstants& kc, double sigma) {
  const double s2 = sigma * sigma;
  const double cd = kc.C_d(sigma);
  return kc.C * kc.C * s2 * s2 / (cd * cd);
}

}  // namespace covfield
