#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "covfield/field.hpp"
#include "covfield/kernel.hpp"
#include "covfield/measure.hpp"

namespace covfield {

// Closed forms for canonical singular measures (arc length, area, volume).

/// Eigenvalue on H of Σ(0,σ) for the r-dimensional volume measure of a linear
/// subspace H ⊂ R^d. Gaussian: σ²/(2πσ²)^{(d−r)/2}. Truncation:
/// σ^{−(d−r−2)} (ν_{r−1}/ν_d) ∫_{−π/2}^{π/2} sin²θ cos^rθ dθ.
double subspace_eigenvalue(int d, int r, KernelKind kind, double sigma);

/// λ Σ v_i v_iᵀ over the orthonormal columns of `basis` (d × r).
CovTensor oracle_subspace(int d, const Eigen::MatrixXd& basis, KernelKind kind, double sigma);

/// Truncation-kernel tensor at the wedge vertex:
/// (1/(3σ^dν_d)) Σ min(σ,ℓ_i)³ v_i v_iᵀ. Directions are unit columns.
CovTensor oracle_wedge(const Eigen::MatrixXd& directions, const std::vector<double>& lengths, double sigma);

struct CircleEigs {
  double normal = 0.0;
  double tangent = 0.0;
};

/// Truncation kernel, arc-length measure of the circle of radius R, query at
/// distance r from the center.
CircleEigs oracle_circle_eigs(double R, double r, double sigma);

/// Full tensor of the same field at x ∈ R² (normal eigenvector x/‖x‖).
CovTensor oracle_circle_tensor(double R, const Point& x, double sigma);

/// Truncation kernel, area measure of the sphere of radius R: (λ_t, λ_t, λ_n).
std::array<double, 3> oracle_sphere_eigs(double R, double r, double sigma);

// Curvature from small-scale spectra of the truncation kernel.
//
// Plugging a single σ into the asymptotic trace formulas fails on quadrature
// data because atoms entering the ball one at a time add an O(spacing) error
// that swamps the σ³ term. Each scale is therefore replaced by a smooth average
// over σ' = σ(1 + f t), t ∈ [−1,1], with the biweight window 15/16 (1−t²)². For
// the truncation kernel this average is a per-atom weight K̄(‖y−x‖), so it
// costs one pass over the atoms, and the asymptotic models are averaged with
// the same window before fitting.

struct CurvatureOptions {
  double window_fraction = 0.2;
  /// Relative residual above which the estimate is reported but not declared.
  double residual_tolerance = 0.05;
  /// Relative slack before s + 4κ₁κ₂ < 0 counts as an inconsistent fit.
  double consistency_tolerance = 0.1;
  /// Absolute slack in squared curvature, for nearly flat points where s and q are both noise.
  double flat_tolerance = 0.01;
  /// |κ₁−κ₂| below this fraction of |κ| is treated as umbilic.
  double umbilic_fraction = 0.05;
};

struct CurveCurvatureEstimate {
  Point point;
  std::vector<double> sigma_ladder;
  double kappa_abs = 0.0;
  double kappa_sq_fit = 0.0;
  double residual = 0.0;
  bool clamped = false;   // fitted κ² was negative and set to 0
  bool declared = false;  // residual below tolerance
};

struct SurfaceCurvatureEstimate {
  Point point;
  std::vector<double> sigma_ladder;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double s = 0.0;  // (κ₁−κ₂)²
  double q = 0.0;  // 3κ₁² + 2κ₁κ₂ + 3κ₂²
  double residual = 0.0;
  bool sign_ambiguity = true;
  bool umbilic = false;
  bool declared = false;
};

/// Window-averaged tensor Σ̄(x,σ) = Σ_i w_i (y_i−x)(y_i−x)ᵀ K̄(‖y_i−x‖).
CovTensor windowed_ctf(const WeightedMeasure& measure, const Point& x, double sigma, double window_fraction);

/// Window average of σ'^k, that is ∫ W(t) (σ(1+ft))^k dt.
double window_moment(double sigma, double window_fraction, int k);

/// Fits tr = 2σ/(3π) + κ²σ³/(20π) over the ladder (plane curves, d = 2).
CurveCurvatureEstimate curve_curvature(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x,
                                       const std::vector<double>& sigma_ladder, const CurvatureOptions& opts = {});

/// Fits tr = 3σ/8 + sσ³/64 and det = (3σ/16)² qσ³/128 over the ladder
/// (surfaces in R³), then solves for (κ₁, κ₂) with κ₁ + κ₂ ≥ 0.
SurfaceCurvatureEstimate surface_curvatures(const WeightedMeasure& measure, const RadialKernel& kernel,
                                            const Point& p, const std::vector<double>& sigma_ladder,
                                            const CurvatureOptions& opts = {});

/// Solves κ₁κ₂ = (q−3s)/8, κ₁+κ₂ = √(s+4κ₁κ₂). Throws NumericalError when
/// s + 4κ₁κ₂ is negative beyond the tolerance.
std::pair<double, double> principal_from_invariants(double s, double q, const CurvatureOptions& opts, bool* umbilic);

// Fourier side of the Gaussian Fréchet function V = h_σ ∗ α,
// h_σ(x) = ‖x‖² (2πσ²)^{−d/2} exp(−‖x‖²/2σ²).

/// σ²(d − σ²‖ξ‖²/π) exp(−σ²‖ξ‖²/2π); equals ∫ h_σ(x) e^{i⟨x,ξ⟩/√π} dx and
/// vanishes exactly on ‖ξ‖ = √(πd)/σ.
double gaussian_transfer_hat(double sigma, int d, const Eigen::VectorXd& xi);
/// ∫ h_σ(x) e^{i⟨x,ξ⟩} dx = (dσ² − σ⁴‖ξ‖²) exp(−σ²‖ξ‖²/2), zero on ‖ξ‖ = √d/σ.
double gaussian_transfer_characteristic(double sigma, int d, const Eigen::VectorXd& xi);
double h_sigma(double sigma, const Eigen::VectorXd& x);

}  // namespace covfield
