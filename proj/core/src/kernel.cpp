#include "covfield/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "covfield/errors.hpp"

namespace covfield {

namespace {

constexpr double kPi = std::numbers::pi;

/// ∫_a^b r^p (c0 + c1 r) dr for p ≥ −1/2.
double power_linear_integral(double p, double c0, double c1, double a, double b) {
  auto prim = [&](double r) {
    if (r == 0.0) return 0.0;
    return c0 * std::pow(r, p + 1) / (p + 1) + c1 * std::pow(r, p + 2) / (p + 2);
  };
  return prim(b) - prim(a);
}

double golden_max(const std::function<double(double)>& g, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = g(d);
    }
  }
  return std::max(gc, gd);
}

}  // namespace

RadialKernel RadialKernel::gaussian() {
  RadialKernel k;
  k.kind_ = KernelKind::gaussian;
  k.name_ = "gaussian";
  return k;
}

RadialKernel RadialKernel::truncation() {
  RadialKernel k;
  k.kind_ = KernelKind::truncation;
  k.name_ = "truncation";
  return k;
}

RadialKernel RadialKernel::tabulated(std::vector<double> r, std::vector<double> f, std::string name) {
  if (r.size() < 2 || r.size() != f.size()) throw std::invalid_argument("tabulated kernel needs ≥ 2 matching knots");
  if (r.front() != 0.0) throw std::invalid_argument("tabulated kernel must start at r = 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("tabulated knots must increase");
  double fmax = 0.0;
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("profile must be non-negative");
    fmax = std::max(fmax, v);
  }
  if (std::abs(fmax - 1.0) > 1e-12) throw std::invalid_argument("profile must have sup f = 1");
  RadialKernel k;
  k.kind_ = KernelKind::tabulated;
  k.name_ = std::move(name);
  k.tr_ = std::move(r);
  k.tf_ = std::move(f);
  return k;
}

RadialKernel RadialKernel::by_name(const std::string& name) {
  if (name == "gaussian") return gaussian();
  if (name == "truncation") return truncation();
  throw std::invalid_argument("unknown kernel: " + name);
}

RadialKernel RadialKernel::from_table_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("r,f", 0) != 0) throw ParseError("line 1: header must be r,f", 1);
  std::vector<double> r, f;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected r,f", lineno);
    try {
      r.push_back(std::stod(line.substr(0, comma)));
      f.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": not a number", lineno);
    }
  }
  return tabulated(std::move(r), std::move(f), path);
}

double RadialKernel::table_value(double r) const {
  if (r < 0.0 || r > tr_.back()) return 0.0;
  const auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
  if (it == tr_.end()) return tf_.back();
  const auto i = static_cast<std::size_t>(it - tr_.begin());
  const double t = (r - tr_[i - 1]) / (tr_[i] - tr_[i - 1]);
  return tf_[i - 1] + t * (tf_[i] - tf_[i - 1]);
}

double RadialKernel::derivative(double r) const {
  if (kind_ == KernelKind::gaussian) return -0.5 * std::exp(-0.5 * r);
  throw std::invalid_argument("kernel '" + name_ + "' has no derivative");
}

std::optional<double> RadialKernel::compact_support_radius_sq() const {
  switch (kind_) {
    case KernelKind::gaussian: return std::nullopt;
    case KernelKind::truncation: return 1.0;
    case KernelKind::tabulated: return tr_.back();
  }
  return std::nullopt;
}

double unit_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("negative dimension");
  if (d == 0) return 1.0;
  return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double unit_sphere_area(int dm1) {
  const int d = dm1 + 1;
  if (d < 1) throw std::invalid_argument("sphere dimension must be ≥ 0");
  return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
}

double KernelConstants::C_d(double sigma) const {
  return 0.5 * std::pow(sigma, dim) * M_d * omega_dm1;
}

double kernel_M_d(const RadialKernel& kernel, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  switch (kernel.kind()) {
    case KernelKind::gaussian: return std::pow(2.0, d / 2.0) * std::tgamma(d / 2.0);
    case KernelKind::truncation: return 2.0 / d;
    case KernelKind::tabulated: {
      const auto& r = kernel.table_r();
      const auto& f = kernel.table_f();
      const double p = d / 2.0 - 1.0;
      double total = 0.0;
      for (std::size_t i = 1; i < r.size(); ++i) {
        const double c1 = (f[i] - f[i - 1]) / (r[i] - r[i - 1]);
        const double c0 = f[i - 1] - c1 * r[i - 1];
        total += power_linear_integral(p, c0, c1, r[i - 1], r[i]);
      }
      if (!std::isfinite(total) || !(total > 0.0)) throw NumericalError("condition (b) violated: M_d not finite and positive");
      return total;
    }
  }
  return 0.0;
}

double sup_search(const std::function<double(double)>& g, double r_max, double step) {
  const auto n = static_cast<long>(std::ceil(r_max / step));
  double best = -std::numeric_limits<double>::infinity();
  long arg = 1;
  for (long k = 1; k <= n; ++k) {
    const double r = std::min(r_max, step * static_cast<double>(k));
    const double v = g(r);
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  const double lo = step * static_cast<double>(arg - 1);
  const double hi = std::min(r_max, step * static_cast<double>(arg + 1));
  return std::max(best, golden_max(g, std::max(lo, 1e-300), hi));
}

KernelConstants derive_constants(const RadialKernel& kernel, int d) {
  KernelConstants kc;
  kc.dim = d;
  kc.M_d = kernel_M_d(kernel, d);
  kc.nu_d = unit_ball_volume(d);
  kc.omega_dm1 = unit_sphere_area(d - 1);

  const double r_max = kernel.kind() == KernelKind::tabulated ? kernel.table_r().back() : 100.0;
  const double step = 1e-3;
  auto rf = [&](double r) { return r * kernel.profile(r); };
  auto sf = [&](double r) { return std::sqrt(r) * kernel.profile(r); };
  kc.C = sup_search(rf, r_max, step);
  kc.A2 = sup_search(sf, r_max, step);
  // Discontinuous profiles attain their sup at a knot, which the grid may straddle.
  std::vector<double> knots;
  if (kernel.kind() == KernelKind::truncation) knots = {1.0};
  if (kernel.kind() == KernelKind::tabulated) knots = kernel.table_r();
  for (double r : knots) {
    kc.C = std::max(kc.C, rf(r));
    kc.A2 = std::max(kc.A2, sf(r));
  }
  if (kernel.has_derivative()) {
    kc.A1 = sup_search([&](double r) { return std::pow(r, 1.5) * std::abs(kernel.derivative(r)); }, r_max, step);
    kc.A_f = 2.0 * (kc.A1 + kc.A2);
    kc.smooth_stability_eligible = std::isfinite(kc.A1);
  } else {
    kc.A1 = std::numeric_limits<double>::infinity();
    kc.A_f = std::numeric_limits<double>::infinity();
    kc.smooth_stability_eligible = false;
  }
  return kc;
}

ScaledKernel::ScaledKernel(const RadialKernel& kernel, int d, double sigma)
    : kernel_(&kernel), sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  inv_s2_ = 1.0 / (sigma * sigma);
  const double cd = 0.5 * std::pow(sigma, d) * kernel_M_d(kernel, d) * unit_sphere_area(d - 1);
  inv_cd_ = 1.0 / cd;
}

std::optional<double> ScaledKernel::support_radius() const {
  const auto r2 = kernel_->compact_support_radius_sq();
  if (!r2) return std::nullopt;
  return sigma_ * std::sqrt(*r2);
}

double eval_kernel(const RadialKernel& kernel, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double sigma, int d) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (x.size() != d || y.size() != d) throw std::invalid_argument("dimension mismatch");
  return ScaledKernel(kernel, d, sigma).of_sq((y - x).squaredNorm());
}

}  // namespace covfield
