#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "covfield/errors.hpp"
#include "covfield/geometry.hpp"

namespace covfield {

namespace {

constexpr double kPi = std::numbers::pi;
using Rule = boost::math::quadrature::gauss<double, 24>;

double biweight(double t) {
  const double u = 1.0 - t * t;
  return 15.0 / 16.0 * u * u;
}

/// K̄(r) = ∫ W(t) χ(r ≤ σ(1+ft)) / ((σ(1+ft))^d ν_d) dt
double window_kernel(double r, double sigma, double f, int d, double nu_d) {
  const double t0 = std::clamp((r / sigma - 1.0) / f, -1.0, 1.0);
  if (t0 >= 1.0) return 0.0;
  return Rule::integrate(
      [&](double t) { return biweight(t) / (std::pow(sigma * (1.0 + f * t), d) * nu_d); }, t0, 1.0);
}

void check_ladder(const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw std::invalid_argument("curvature fits need at least 3 scales");
  for (double s : ladder)
    if (!(s > 0.0)) throw std::invalid_argument("scales must be positive");
}

void check_truncation(const RadialKernel& kernel) {
  if (kernel.kind() != KernelKind::truncation)
    throw std::invalid_argument("curvature estimation requires the truncation kernel");
}

/// Least-squares slope through the origin: argmin_c Σ (y − c b)².
double ls_slope(const std::vector<double>& b, const std::vector<double>& y) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    num += b[k] * y[k];
    den += b[k] * b[k];
  }
  return den > 0 ? num / den : 0.0;
}

double relative_residual(const std::vector<double>& b, const std::vector<double>& y, double c,
                         const std::vector<double>& scale) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double e = y[k] - c * b[k];
    num += e * e;
    den += scale[k] * scale[k];
  }
  return den > 0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace

double window_moment(double sigma, double f, int k) {
  return Rule::integrate([&](double t) { return biweight(t) * std::pow(sigma * (1.0 + f * t), k); }, -1.0, 1.0);
}

CovTensor windowed_ctf(const WeightedMeasure& measure, const Point& x, double sigma, double f) {
  if (x.size() != measure.dim) throw std::invalid_argument("dimension mismatch between point and measure");
  if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("window fraction must lie in (0,1)");
  const int d = measure.dim;
  const double nu = unit_ball_volume(d);
  const double reach = sigma * (1.0 + f);
  CovTensor t = CovTensor::Zero(d, d);
  Eigen::VectorXd diff(d);
  for (Eigen::Index j = 0; j < measure.size(); ++j) {
    diff = measure.atoms.col(j) - x;
    const double r = diff.norm();
    if (r > reach) continue;
    const double k = window_kernel(r, sigma, f, d, nu);
    if (k == 0.0) continue;
    t.noalias() += (measure.weights[j] * k) * diff * diff.transpose();
  }
  return t;
}

CurveCurvatureEstimate curve_curvature(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x,
                                       const std::vector<double>& ladder, const CurvatureOptions& opts) {
  check_truncation(kernel);
  check_ladder(ladder);
  if (measure.dim != 2) throw std::invalid_argument("curve curvature is defined for plane curves");
  const double f = opts.window_fraction;
  std::vector<double> b, y, total;
  for (double s : ladder) {
    const double tr = windowed_ctf(measure, x, s, f).trace();
    b.push_back(window_moment(s, f, 3) / (20.0 * kPi));
    y.push_back(tr - 2.0 * window_moment(s, f, 1) / (3.0 * kPi));
    total.push_back(tr);
  }
  CurveCurvatureEstimate est;
  est.point = x;
  est.sigma_ladder = ladder;
  est.kappa_sq_fit = ls_slope(b, y);
  est.residual = relative_residual(b, y, est.kappa_sq_fit, total);
  est.clamped = est.kappa_sq_fit < 0;
  est.kappa_abs = std::sqrt(std::max(est.kappa_sq_fit, 0.0));
  est.declared = est.residual <= opts.residual_tolerance;
  return est;
}

std::pair<double, double> principal_from_invariants(double s, double q, const CurvatureOptions& opts, bool* umbilic) {
  s = std::max(s, 0.0);
  const double kk = (q - 3.0 * s) / 8.0;  // κ₁κ₂
  const double disc = s + 4.0 * kk;        // (κ₁+κ₂)²
  const double tol = opts.consistency_tolerance * std::max(std::abs(s), std::abs(q)) + opts.flat_tolerance;
  if (disc < -tol)
    throw NumericalError("inconsistent curvature fit: s + 4 k1 k2 = " + std::to_string(disc) + " < 0");
  const double sum = std::sqrt(std::max(disc, 0.0));
  const double gap = std::sqrt(s);
  const double mean_abs = std::sqrt(std::max(q, 0.0) / 8.0);
  if (umbilic) *umbilic = false;
  if (mean_abs > 0 && gap <= opts.umbilic_fraction * mean_abs) {
    if (umbilic) *umbilic = true;
    return {mean_abs, mean_abs};
  }
  return {(sum + gap) / 2.0, (sum - gap) / 2.0};
}

SurfaceCurvatureEstimate surface_curvatures(const WeightedMeasure& measure, const RadialKernel& kernel,
                                            const Point& p, const std::vector<double>& ladder,
                                            const CurvatureOptions& opts) {
  check_truncation(kernel);
  check_ladder(ladder);
  if (measure.dim != 3) throw std::invalid_argument("surface curvatures need a measure in R^3");
  const double f = opts.window_fraction;
  std::vector<double> bt, yt, tt, bd, yd;
  for (double s : ladder) {
    const CovTensor t = windowed_ctf(measure, p, s, f);
    const double a1 = 3.0 / 16.0 * window_moment(s, f, 1);
    const double a3 = window_moment(s, f, 3);
    const double tr = t.trace();
    bt.push_back(a3 / 64.0);
    yt.push_back(tr - 2.0 * a1);
    tt.push_back(tr);
    bd.push_back(a1 * a1 * a3 / 128.0);
    yd.push_back(t.determinant());
  }
  SurfaceCurvatureEstimate est;
  est.point = p;
  est.sigma_ladder = ladder;
  est.s = ls_slope(bt, yt);
  est.q = ls_slope(bd, yd);
  est.residual = std::max(relative_residual(bt, yt, est.s, tt), relative_residual(bd, yd, est.q, yd));
  const auto [k1, k2] = principal_from_invariants(est.s, est.q, opts, &est.umbilic);
  est.kappa1 = k1;
  est.kappa2 = k2;
  est.sign_ambiguity = k1 != 0.0 || k2 != 0.0;
  est.declared = est.residual <= opts.residual_tolerance;
  return est;
}

}  // namespace covfield
