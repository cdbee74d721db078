#include "covfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "covfield/errors.hpp"

namespace covfield {

namespace {

constexpr double kPi = std::numbers::pi;

double arc_angle(double R, double r, double sigma) {
  const double c = (R * R + r * r - sigma * sigma) / (2.0 * R * r);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

void check_radial_args(double R, double r, double sigma) {
  if (!(R > 0.0) || !(sigma > 0.0) || r < 0.0) throw std::invalid_argument("need R > 0, sigma > 0, r ≥ 0");
  if (r == 0.0 && R <= sigma) throw std::domain_error("query at the center with R ≤ sigma: angle undefined");
}

}  // namespace

double subspace_eigenvalue(int d, int r, KernelKind kind, double sigma) {
  if (r < 1 || r > d) throw std::invalid_argument("need 1 ≤ r ≤ d");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  switch (kind) {
    case KernelKind::gaussian:
      return 1.0 / (std::pow(std::sqrt(2.0 * kPi), d - r) * std::pow(sigma, d - r - 2));
    case KernelKind::truncation: {
      // ∫_{−π/2}^{π/2} sin²θ cos^rθ dθ = B(3/2, (r+1)/2)
      const double integral = std::tgamma(1.5) * std::tgamma((r + 1) / 2.0) / std::tgamma((r + 4) / 2.0);
      return std::pow(sigma, -(d - r - 2)) * unit_ball_volume(r - 1) / unit_ball_volume(d) * integral;
    }
    case KernelKind::tabulated: break;
  }
  throw std::invalid_argument("no closed form for tabulated kernels");
}

CovTensor oracle_subspace(int d, const Eigen::MatrixXd& basis, KernelKind kind, double sigma) {
  if (basis.rows() != d) throw std::invalid_argument("basis rows must equal d");
  const auto r = static_cast<int>(basis.cols());
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  if ((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("basis is not orthonormal");
  return subspace_eigenvalue(d, r, kind, sigma) * basis * basis.transpose();
}

CovTensor oracle_wedge(const Eigen::MatrixXd& directions, const std::vector<double>& lengths, double sigma) {
  const auto d = static_cast<int>(directions.rows());
  const auto n = directions.cols();
  if (static_cast<std::size_t>(n) != lengths.size()) throw std::invalid_argument("one length per direction");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(directions.col(i).norm() - 1.0) > 1e-10) throw std::invalid_argument("directions must be unit vectors");
    if (!(lengths[static_cast<std::size_t>(i)] > 0.0)) throw std::invalid_argument("lengths must be positive");
    for (Eigen::Index j = 0; j < i; ++j)
      if ((directions.col(i) - directions.col(j)).norm() < 1e-12) throw std::invalid_argument("duplicate direction");
  }
  CovTensor t = CovTensor::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::min(sigma, lengths[static_cast<std::size_t>(i)]);
    t += m * m * m * directions.col(i) * directions.col(i).transpose();
  }
  return t / (3.0 * std::pow(sigma, d) * unit_ball_volume(d));
}

CircleEigs oracle_circle_eigs(double R, double r, double sigma) {
  check_radial_args(R, r, sigma);
  if (std::abs(r - R) > sigma) return {};
  const double phi = arc_angle(R, r, sigma);
  const double s = std::sin(phi), c = std::cos(phi);
  const double scale = 1.0 / (kPi * sigma * sigma);
  CircleEigs e;
  e.normal = scale * (R * phi * (R * R + 2 * r * r) + R * R * (R * c - 4 * r) * s);
  e.tangent = scale * R * R * R * (phi - s * c);
  return e;
}

CovTensor oracle_circle_tensor(double R, const Point& x, double sigma) {
  if (x.size() != 2) throw std::invalid_argument("circle tensor needs a point in R^2");
  const double r = x.norm();
  const auto e = oracle_circle_eigs(R, r, sigma);
  if (r == 0.0) return CovTensor::Zero(2, 2);
  const Eigen::Vector2d n = x / r;
  const Eigen::Vector2d t(-n.y(), n.x());
  return e.normal * n * n.transpose() + e.tangent * t * t.transpose();
}

std::array<double, 3> oracle_sphere_eigs(double R, double r, double sigma) {
  check_radial_args(R, r, sigma);
  if (std::abs(r - R) > sigma) return {0.0, 0.0, 0.0};
  const double phi = arc_angle(R, r, sigma);
  const double c = std::cos(phi);
  const double s2 = std::sin(phi / 2);
  const double s3 = sigma * sigma * sigma;
  const double lt = std::pow(R, 4) / s3 * s2 * s2 * s2 * s2 * (c + 2.0);
  const double pre = R * R / (2.0 * s3) * (1.0 - c);
  const double ln = pre * (R * R + R * c * (R * c + R - 3 * r)) + pre * (-3 * R * r + 3 * r * r);
  return {lt, lt, ln};
}

double h_sigma(double sigma, const Eigen::VectorXd& x) {
  const auto d = static_cast<double>(x.size());
  const double r2 = x.squaredNorm();
  return r2 / std::pow(2 * kPi * sigma * sigma, d / 2) * std::exp(-r2 / (2 * sigma * sigma));
}

double gaussian_transfer_hat(double sigma, int d, const Eigen::VectorXd& xi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double a = sigma * sigma * xi.squaredNorm() / kPi;
  return sigma * sigma * (d - a) * std::exp(-a / 2);
}

double gaussian_transfer_characteristic(double sigma, int d, const Eigen::VectorXd& xi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double a = sigma * sigma * xi.squaredNorm();
  return sigma * sigma * (d - a) * std::exp(-a / 2);
}

}  // namespace covfield
