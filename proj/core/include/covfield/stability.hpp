#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covfield/field.hpp"
#include "covfield/kernel.hpp"
#include "covfield/measure.hpp"
#include "covfield/transport.hpp"

namespace covfield {

/// Outcome of comparing a measured field difference with a theoretical bound.
struct StabilityReport {
  std::string theorem;      // "smooth" or "truncation"
  double lhs = 0.0;         // max over the grid of ‖Σ_α − Σ_β‖_F
  double rhs = 0.0;         // bound
  double slack = 0.0;       // rhs − lhs
  double distance = 0.0;    // W₁ or W∞
  double constant = 0.0;    // σA_f/C_d(σ), or λ·A(σ,d,c)
  double sigma = 0.0;
  double A_f = 0.0;
  std::optional<double> lambda;
  std::optional<double> diameter;
  bool heuristic = false;   // hypotheses of the theorem not certified
  bool passed = false;
};

/// max over the grid of the Frobenius norm of Σ_α(x,σ) − Σ_β(x,σ).
double sup_field_difference(const WeightedMeasure& alpha, const WeightedMeasure& beta, const RadialKernel& kernel,
                            double sigma, const std::vector<Point>& grid);

/// Checks sup ‖Σ_α − Σ_β‖ ≤ (σA_f/C_d(σ)) W₁(α,β) on the grid.
StabilityReport check_stability_smooth(const WeightedMeasure& alpha, const WeightedMeasure& beta,
                                       const RadialKernel& kernel, double sigma, const std::vector<Point>& grid,
                                       const TransportOptions& opts = {});

/// A(σ,d,c) = [d/(d+2)](σ+c)^{d+2}/(cσ^d) + (2σ+c)(σ+c)^d/σ^d + [2d/(d+2)](σ+c)^{d+2}/(cσ^d)
double truncation_stability_constant(double sigma, int d, double c);

/// Checks sup ‖Σ_α − Σ_β‖ ≤ λ A(σ,d,c) W∞(α,β) for the truncation kernel.
/// λ bounds the density of α and must be supplied; for atomic α the theorem
/// does not apply and the caller should set heuristic.
StabilityReport check_stability_trunc(const WeightedMeasure& alpha, const WeightedMeasure& beta, double sigma,
                                      double diameter, std::optional<double> lambda,
                                      const std::vector<Point>& grid, bool heuristic = false,
                                      const TransportOptions& opts = {});

/// s_d(a,b) = ω_{d−1}/(d+2) (b^{d+2} − a^{d+2}), the integral of ‖y‖² over a < ‖y‖ ≤ b.
double radial_moment(double a, double b, int d);
/// (b − a) ω_{d−1}/(d+2) B^{d+2}/(B − a), an upper bound for s_d(a,b) when b ≤ B.
double radial_moment_bound(double a, double b, double B, int d);

/// Q_σ(z) = (z ⊗ z) K_σ(z).
Eigen::MatrixXd q_sigma(const RadialKernel& kernel, const Eigen::VectorXd& z, double sigma);
/// A_f σ / C_d(σ), the Lipschitz constant of Q_σ.
double q_sigma_lipschitz(const KernelConstants& kc, double sigma);

/// z_uv(y) = ⟨y−x,u⟩⟨y−x,v⟩ K(x,y,σ), whose mean over α is Σ_α(x,σ)(u,v).
double z_uv(const RadialKernel& kernel, const Point& x, const Point& y, const Eigen::VectorXd& u,
            const Eigen::VectorXd& v, double sigma);
/// C²σ⁴/C_d(σ)², the uniform variance bound for z_uv.
double z_uv_variance_bound(const KernelConstants& kc, double sigma);

}  // namespace covfield
