#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace covfield {

enum class KernelKind { gaussian, truncation, tabulated };

/// Radial profile f with K(x,y,σ) = f(‖y−x‖²/σ²) / C_d(σ).
class RadialKernel {
 public:
  static RadialKernel gaussian();
  static RadialKernel truncation();
  /// Piecewise-linear profile through (r_k, f_k); zero beyond the last knot.
  /// No derivative is attached, so such kernels never enter smooth stability checks.
  static RadialKernel tabulated(std::vector<double> r, std::vector<double> f, std::string name);
  /// "gaussian" or "truncation".
  static RadialKernel by_name(const std::string& name);
  /// CSV with header r,f.
  static RadialKernel from_table_csv(const std::string& path);

  KernelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double profile(double r) const {
    switch (kind_) {
      case KernelKind::gaussian: return std::exp(-0.5 * r);
      case KernelKind::truncation: return r <= 1.0 ? 1.0 : 0.0;
      case KernelKind::tabulated: return table_value(r);
    }
    return 0.0;
  }
  bool has_derivative() const { return kind_ == KernelKind::gaussian; }
  /// f′(r); throws if the kernel has no derivative.
  double derivative(double r) const;
  /// Squared support radius in units of σ², when the profile vanishes beyond it.
  std::optional<double> compact_support_radius_sq() const;

  const std::vector<double>& table_r() const { return tr_; }
  const std::vector<double>& table_f() const { return tf_; }

 private:
  double table_value(double r) const;

  KernelKind kind_ = KernelKind::gaussian;
  std::string name_;
  std::vector<double> tr_, tf_;
};

double unit_ball_volume(int d);     // ν_d, with ν_0 = 1
double unit_sphere_area(int dm1);   // ω_{d−1} for d = dm1 + 1

struct KernelConstants {
  int dim = 0;
  double M_d = 0.0;
  double C = 0.0;   // sup r f(r)
  double A1 = 0.0;  // sup r^{3/2} |f′(r)|, infinite without a derivative
  double A2 = 0.0;  // sup √r f(r)
  double A_f = 0.0;
  double nu_d = 0.0;
  double omega_dm1 = 0.0;
  bool smooth_stability_eligible = false;

  /// C_d(σ) = ½ σ^d M_d ω_{d−1}
  double C_d(double sigma) const;
};

/// M_d = ∫ r^{d/2−1} f(r) dr: closed form for the builtins, exact piecewise
/// integration for tabulated profiles.
double kernel_M_d(const RadialKernel& kernel, int d);

/// C, A1 and A2 come from a dense grid search with golden-section refinement.
KernelConstants derive_constants(const RadialKernel& kernel, int d);

/// Grid-search sup of g over (0, r_max] with the given step, refined locally.
double sup_search(const std::function<double(double)>& g, double r_max, double step);

/// Kernel bound to a dimension and scale, for inner loops.
class ScaledKernel {
 public:
  ScaledKernel(const RadialKernel& kernel, int d, double sigma);

  /// K as a function of the squared distance.
  double of_sq(double r2) const { return inv_cd_ * kernel_->profile(r2 * inv_s2_); }
  double sigma() const { return sigma_; }
  double inv_C_d() const { return inv_cd_; }
  const RadialKernel& kernel() const { return *kernel_; }
  std::optional<double> support_radius() const;

 private:
  const RadialKernel* kernel_;
  double sigma_, inv_s2_, inv_cd_;
};

/// K(x,y,σ) = f(‖y−x‖²/σ²)/C_d(σ)
double eval_kernel(const RadialKernel& kernel, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, double sigma, int d);

}  // namespace covfield
