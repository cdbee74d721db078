// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "covfield/cluster.hpp"
#include "covfield/experiments.hpp"
#include "covfield/field.hpp"
#include "covfield/geometry.hpp"
#include "covfield/measure.hpp"
#include "covfield/rng.hpp"
#include "covfield/stability.hpp"
#include "covfield/transport.hpp"
#include "oracles.hpp"

using namespace covfield;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double ball_volume(int d) { return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1); }

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Eigen::MatrixXd euclidean(const Eigen::MatrixXd& P) {
  Eigen::MatrixXd D(P.cols(), P.cols());
  for (Eigen::Index i = 0; i < P.cols(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) D(i, j) = (P.col(i) - P.col(j)).norm();
  return D;
}

WeightedMeasure random_probability(Rng& rng, int d, int n, bool uniform, double half = 1.0) {
  Eigen::MatrixXd atoms(d, n);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) atoms(i, j) = rng.uniform(-half, half);
    w[j] = uniform ? 1.0 : rng.uniform(0.05, 1.0);
  }
  return make_measure(atoms, w / w.sum());
}

// 1. Line measure against λ₁ = 2/(3σ^{d−3}ν_d).
Outcome line_oracle() {
  Outcome o;
  double worst = 0;
  for (int d = 2; d <= 3; ++d) {
    Point v = d == 2 ? vec({0.6, 0.8}) : vec({2.0 / 7, 3.0 / 7, 6.0 / 7});
    const auto m = quadrature_segment(-3.0 * v, 3.0 * v, 1e-4);
    for (double s : {0.3, 0.5, 1.0}) {
      const auto sp = spectrum(ctf_at(m, RadialKernel::truncation(), Point::Zero(d), s));
      const double exact = 2.0 / (3.0 * std::pow(s, d - 3) * ball_volume(d));
      const double rel = std::abs(sp.eigenvalues[d - 1] - exact) / exact;
      worst = std::max(worst, rel);
      // The complement of the line is the null space.
      if (sp.eigenvalues[d - 2] > 1e-12 * exact) o.pass = false;
      if (std::abs(std::abs(sp.eigenvectors.col(d - 1).dot(v)) - 1) > 1e-10) o.pass = false;
    }
  }
  o.pass = o.pass && worst <= 1e-4;
  o.detail = fmt("max relative error %.2e (tol 1e-4)", worst);
  return o;
}

// 2. Circle quadrature against the closed-form eigenvalues, r ∈ [0.9, 1.1].
Outcome circle_field() {
  const double R = 1.0, s = 0.1, angle = 0.37;
  const auto m = quadrature_circle(R, 100000, 0.123);
  std::vector<double> emp_n, emp_t, ex_n, ex_t;
  double top = 0;
  for (int k = 0; k <= 20; ++k) {
    const double r = 0.9 + 0.01 * k;
    const double phi = std::acos(std::clamp((R * R + r * r - s * s) / (2 * r * R), -1.0, 1.0));
    const double sn = std::sin(phi), cs = std::cos(phi);
    const double ln = (R * phi * (R * R + 2 * r * r) + R * R * (R * cs - 4 * r) * sn) / (kPi * s * s);
    const double lt = R * R * R * (phi - sn * cs) / (kPi * s * s);
    const Point x = vec({r * std::cos(angle), r * std::sin(angle)});
    const Eigen::Vector2d nrm(std::cos(angle), std::sin(angle)), tan(-std::sin(angle), std::cos(angle));
    const auto t = ctf_at(m, RadialKernel::truncation(), x, s);
    emp_n.push_back(nrm.dot(t * nrm));
    emp_t.push_back(tan.dot(t * tan));
    ex_n.push_back(ln);
    ex_t.push_back(lt);
    top = std::max({top, std::abs(ln), std::abs(lt)});
  }
  double worst = 0;
  for (std::size_t k = 0; k < ex_n.size(); ++k)
    worst = std::max({worst, std::abs(emp_n[k] - ex_n[k]), std::abs(emp_t[k] - ex_t[k])});
  Outcome o;
  o.pass = worst <= 1e-3 * top;
  o.detail = fmt("max |emp - exact| / max|exact| = %.2e (tol 1e-3), max|exact| = %.4f", worst / top, top);
  return o;
}

// 3. Curvature from σ-ladders.
Outcome curvature() {
  Outcome o;
  std::string d;
  const std::vector<double> curve_ladder{0.05, 0.04, 0.03};
  double worst_circle = 0;
  for (double R : {0.5, 1.0, 2.0}) {
    const auto m = quadrature_circle(R, static_cast<int>(std::lround(2 * kPi * R / 1e-3)));
    const auto e = curve_curvature(m, RadialKernel::truncation(), vec({R * std::cos(0.7), R * std::sin(0.7)}), curve_ladder);
    worst_circle = std::max(worst_circle, std::abs(e.kappa_abs - 1 / R) * R);
  }
  const auto line = quadrature_segment(vec({-3, -1}), vec({3, 1}), 1e-3);
  const double kline = curve_curvature(line, RadialKernel::truncation(), vec({0.3, 0.1}), curve_ladder).kappa_abs;

  const std::vector<double> surf_ladder{0.1, 0.08, 0.06};
  const auto sphere = quadrature_sphere(1.0, 800, 1600);
  const double th = 1.1, ph = 0.4;
  const auto es = surface_curvatures(sphere, RadialKernel::truncation(),
                                     vec({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}), surf_ladder);
  const double sphere_err = std::max(std::abs(es.kappa1 - 1), std::abs(es.kappa2 - 1));

  const int n = 121;
  const double h = 0.005;
  Eigen::MatrixXd atoms(3, n * n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) atoms.col(k++) << (i - n / 2) * h, (j - n / 2) * h, 0.0;
  const auto plane = make_measure(atoms, Eigen::VectorXd::Constant(n * n, h * h));
  const auto ep = surface_curvatures(plane, RadialKernel::truncation(), vec({0.0013, 0.0007, 0}), surf_ladder);
  const double plane_err = std::max(std::abs(ep.kappa1), std::abs(ep.kappa2));

  o.pass = worst_circle <= 0.10 && kline <= 0.05 && sphere_err <= 0.15 && plane_err <= 0.05;
  o.detail = fmt("circles max rel err %.3f, line |k| %.3f", worst_circle, kline) +
             fmt(", sphere max err %.3f, plane max |k| %.3f", sphere_err, plane_err);
  return o;
}

// 4. V = tr Σ on random inputs.
Outcome trace_identity() {
  Rng rng(404);
  const std::vector<RadialKernel> kernels{RadialKernel::gaussian(), RadialKernel::truncation(),
                                          RadialKernel::tabulated({0, 0.5, 1, 2}, {1, 0.8, 0.3, 0}, "tent")};
  int violations = 0;
  double worst = 0;
  for (int c = 0; c < 10000; ++c) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto m = random_probability(rng, d, 1 + static_cast<int>(rng.below(40)), false, 2.0);
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.uniform(-2.5, 2.5);
    const double s = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
    const auto& k = kernels[rng.below(3)];
    const double v = frechet_value(m, k, x, s);
    const double err = std::abs(v - ctf_at(m, k, x, s).trace()) / std::max(1.0, v);
    worst = std::max(worst, err);
    if (err > 1e-10) ++violations;
  }
  return {violations == 0, fmt("%g violations, max scaled error %.2e (tol 1e-10)", violations, worst)};
}

// 5. sup ‖Σ_α − Σ_β‖ ≤ (σA_f/C_d) W₁, Gaussian kernel in the plane.
Outcome smooth_stability() {
  Rng rng(505);
  // A_f = 2(A1 + A2) for f(r) = e^{−r/2}: A1 at r = 3, A2 at r = 1.
  const double A_f = 2 * (0.5 * std::pow(3.0, 1.5) * std::exp(-1.5) + std::exp(-0.5));
  const auto grid = square_grid(-1.5, 1.5, 13);
  int violations = 0;
  double min_slack_ratio = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 500; ++c) {
    const auto a = random_probability(rng, 2, 1 + static_cast<int>(rng.below(50)), false);
    const auto b = random_probability(rng, 2, 1 + static_cast<int>(rng.below(50)), false);
    const double s = std::array{0.3, 1.0, 3.0}[c % 3];
    const double w1 = w1_exact(a, b).first;
    const double bound = s * A_f / (2 * kPi * s * s) * w1;
    const double lhs = sup_field_difference(a, b, RadialKernel::gaussian(), s, grid);
    if (lhs > bound) ++violations;
    if (bound > 0) min_slack_ratio = std::min(min_slack_ratio, lhs / bound);
    const auto report = check_stability_smooth(a, b, RadialKernel::gaussian(), s, grid);
    if (std::abs(report.rhs - bound) > 1e-9 * bound || !report.passed) ++violations;
  }
  return {violations == 0, fmt("%g violations in 500 pairs, largest lhs/rhs %.3f", violations, min_slack_ratio)};
}

// 6. Q_σ Lipschitz bound.
Outcome q_lipschitz() {
  Rng rng(606);
  const double A_f = 2 * (0.5 * std::pow(3.0, 1.5) * std::exp(-1.5) + std::exp(-0.5));
  int violations = 0;
  double worst = 0;
  for (int c = 0; c < 100000; ++c) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const double s = std::exp(rng.uniform(-2.5, 2.5));
    Eigen::VectorXd z1(d), z2(d);
    for (int i = 0; i < d; ++i) {
      z1[i] = rng.normal(0, 1.5 * s);
      z2[i] = rng.uniform() < 0.5 ? z1[i] + rng.normal(0, 0.05 * s) : rng.normal(0, 1.5 * s);
    }
    const double L = A_f * s / std::pow(2 * kPi * s * s, d / 2.0);
    const double lhs = (q_sigma(RadialKernel::gaussian(), z1, s) - q_sigma(RadialKernel::gaussian(), z2, s)).norm();
    const double rhs = L * (z1 - z2).norm();
    if (lhs > rhs) ++violations;
    if (rhs > 0) worst = std::max(worst, lhs / rhs);
  }
  return {violations == 0, fmt("%g violations in 1e5, largest ratio %.3f", violations, worst)};
}

// 7. Single-linkage ultrametrics do not increase distortion; MST minimax equals path enumeration.
Outcome dendrogram_stability() {
  Rng rng(707);
  int violations = 0;
  for (int c = 0; c < 1000; ++c) {
    const int n = 2 + static_cast<int>(rng.below(12)), m = 2 + static_cast<int>(rng.below(12));
    Eigen::MatrixXd X(2, n), Y(2, m);
    for (int j = 0; j < n; ++j) X.col(j) << rng.normal(), rng.normal();
    for (int j = 0; j < m; ++j) Y.col(j) << rng.normal(), rng.normal();
    Correspondence r;
    r.n_source = n;
    r.n_target = m;
    // A random surjective relation in both directions plus extra pairs.
    for (int i = 0; i < n; ++i) r.pairs.emplace_back(i, static_cast<int>(rng.below(static_cast<std::uint64_t>(m))));
    for (int j = 0; j < m; ++j) r.pairs.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), j);
    const Eigen::MatrixXd dX = euclidean(X), dY = euclidean(Y);
    const double base = distortion(r, dX, dY);
    const double ultra = distortion(r, cophenetic_matrix(single_linkage(dX)), cophenetic_matrix(single_linkage(dY)));
    if (ultra > base + 1e-9) ++violations;
  }
  int mismatches = 0;
  for (int c = 0; c < 300; ++c) {
    const int n = 2 + c % 7;
    Eigen::MatrixXd X(2, n);
    for (int j = 0; j < n; ++j) X.col(j) << rng.normal(), rng.normal();
    const Eigen::MatrixXd D = euclidean(X);
    const auto U = cophenetic_matrix(single_linkage(D));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (U(i, j) != oracle::minimax_paths(D, i, j)) ++mismatches;
  }
  return {violations == 0 && mismatches == 0,
          fmt("%g distortion violations in 1000, %g minimax mismatches (n <= 8)", violations, mismatches)};
}

// 8. Transport against Munkres, brute-force bottleneck, and the metric axioms.
Outcome transport() {
  Rng rng(808);
  double w1_err = 0, winf_err = 0, axiom = 0;
  for (int n : {1, 2, 3, 5, 8, 13, 21, 34, 50, 64}) {
    const auto a = random_probability(rng, 2, n, true), b = random_probability(rng, 2, n, true);
    w1_err = std::max(w1_err, std::abs(w1_exact(a, b).first - oracle::munkres_min_cost(cross_distances(a, b)) / n));
  }
  for (int n = 1; n <= 6; ++n)
    for (int t = 0; t < 20; ++t) {
      const auto a = random_probability(rng, 2, n, true), b = random_probability(rng, 2, n, true);
      winf_err = std::max(winf_err, std::abs(winf_exact(a, b).first - oracle::bottleneck_brute(cross_distances(a, b))));
    }
  for (int t = 0; t < 100; ++t) {
    const bool u = t % 2;
    const auto a = random_probability(rng, 2, 2 + static_cast<int>(rng.below(10)), u);
    const auto b = random_probability(rng, 2, 2 + static_cast<int>(rng.below(10)), u);
    const auto c = random_probability(rng, 2, 2 + static_cast<int>(rng.below(10)), u);
    for (auto dist : {&w1_exact, &winf_exact}) {
      const double ab = dist(a, b, {}).first, ba = dist(b, a, {}).first, bc = dist(b, c, {}).first,
                   ac = dist(a, c, {}).first, aa = dist(a, a, {}).first;
      axiom = std::max({axiom, std::abs(ab - ba), aa, ac - ab - bc, -ab});
    }
  }
  Outcome o;
  o.pass = w1_err <= 1e-9 && winf_err <= 1e-9 && axiom <= 1e-9;
  o.detail = fmt("W1 vs Hungarian %.1e, Winf vs brute force %.1e", w1_err, winf_err) + fmt(", axioms %.1e", axiom);
  return o;
}

// 9. Error decay of the empirical circle field.
Outcome convergence() {
  const auto rep = run_converge(ConvergeConfig{});
  Outcome o;
  const double p = rep.pure_power.exponent;
  o.pass = rep.monotone && p >= -0.6 && p <= -0.4;
  std::string errs;
  for (double e : rep.mean_errors) errs += fmt(" %.3g", e);
  o.detail = fmt("exponent %.3f (band [-0.6,-0.4]), log-power exponent %.3f", p, rep.log_power.exponent) +
             (rep.monotone ? ", monotone;" : ", NOT monotone;") + " errors" + errs;
  return o;
}

// 10. Clustering.
Outcome clustering() {
  Outcome o;
  // Clean three lines, γ = 0, σ = 0.4, six clusters.
  auto cfg = default_noisy_lines();
  cfg.noise_sd = 0.0;
  cfg.n_outliers = 0;
  const auto clean = noisy_lines_dataset(cfg, 1);
  TensorizedMetricParams tp;
  tp.sigma = 0.4;
  tp.gamma = 0.0;
  const auto a6 = cut_at_k(single_linkage(tensorized_distances(clean.measure.atoms, tp)), 6);
  const double clean_err = score(a6.labels, clean.labels);
  const bool clean_ok = clean_err <= 0.10;

  const auto noisy = run_noisy_lines(default_noisy_lines());
  double worst_angle = 0;
  for (double e : noisy.angle_errors_deg) worst_angle = std::max(worst_angle, e);
  const bool noisy_ok = noisy.angle_errors_deg.size() == 3 && worst_angle <= 5.0;

  std::string suites;
  bool suites_ok = true;
  const std::pair<ArrangementKind, double> kinds[] = {
      {ArrangementKind::lines2d, 0.15}, {ArrangementKind::mixed_curves2d, 0.15}, {ArrangementKind::planes3d, 0.12}};
  for (const auto& [kind, tol] : kinds) {
    const auto train = gen_arrangement_suite(kind, 50, 1001);
    const auto test = gen_arrangement_suite(kind, 200, 2002);
    const auto r = run_cluster_benchmark(train, test, default_benchmark_config(kind));
    suites_ok = suites_ok && r.average_error <= tol;
    suites += ", " + to_string(kind) + fmt(" AE %.1f%% (tol %.0f%%)", 100 * r.average_error, 100 * tol);
  }
  o.pass = clean_ok && noisy_ok && suites_ok;
  o.detail = fmt("clean 3-lines error %.1f%% (tol 10%%)", 100 * clean_err) +
             fmt(", noisy lines worst angle %.2f deg at gamma %g", worst_angle, noisy.gamma) + suites;
  return o;
}

// 11. Variance of z_uv against C²σ⁴/C_d².
Outcome clt_variance() {
  Rng rng(1111);
  int violations = 0;
  double worst = 0;
  for (int c = 0; c < 20; ++c) {
    const int d = 1 + c % 3;
    const bool gaussian = c % 2 == 0;
    const double s = std::exp(rng.uniform(std::log(0.1), std::log(2.0)));
    Point x(d);
    Eigen::VectorXd u(d), v(d);
    for (int i = 0; i < d; ++i) {
      x[i] = rng.uniform(-0.5, 0.5);
      u[i] = rng.normal();
      v[i] = rng.normal();
    }
    u.normalize();
    v.normalize();
    // C = sup r f(r): 2/e for the Gaussian, 1 for the truncation kernel.
    const double C = gaussian ? 2 / std::exp(1.0) : 1.0;
    const double Cd = gaussian ? std::pow(2 * kPi * s * s, d / 2.0) : std::pow(s, d) * ball_volume(d);
    const double bound = C * C * std::pow(s, 4) / (Cd * Cd);
    const auto kernel = gaussian ? RadialKernel::gaussian() : RadialKernel::truncation();
    const int n = 100000;
    double m1 = 0, m2 = 0, m4 = 0;
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) {
      // Samples from a law concentrated near x at scale σ so z_uv is not negligible.
      Point y(d);
      for (int k = 0; k < d; ++k) y[k] = x[k] + rng.normal(0, s);
      z[static_cast<std::size_t>(i)] = z_uv(kernel, x, y, u, v, s);
      m1 += z[static_cast<std::size_t>(i)];
    }
    m1 /= n;
    for (double zi : z) {
      const double e = zi - m1;
      m2 += e * e;
      m4 += e * e * e * e;
    }
    const double var = m2 / (n - 1);
    const double se = std::sqrt(std::max(0.0, m4 / n - var * var) / n);
    if (var > bound + 3 * se) ++violations;
    worst = std::max(worst, var / bound);
  }
  return {violations == 0, fmt("%g violations in 20 configurations, largest var/bound %.3f", violations, worst)};
}

// 12. FFT of sampled h_σ against the transfer function.
Outcome transfer_fft() {
  const int N = 1 << 15;
  const double L = 160.0, dx = L / N;
  double worst = 0;
  bool zeros_ok = true;
  std::string zeros;
  for (double s : {0.5, 1.0, 2.0}) {
    std::vector<double> in(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      const double x = -L / 2 + j * dx;
      in[static_cast<std::size_t>(j)] = x * x / (std::sqrt(2 * kPi) * s) * std::exp(-x * x / (2 * s * s));
    }
    std::vector<std::complex<double>> out(static_cast<std::size_t>(N / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(N, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double dxi = std::sqrt(kPi) * 2 * kPi / L;  // ξ spacing of the hat convention
    double prev = 0, zero_at = -1;
    for (int k = 0; k <= N / 2; ++k) {
      const double xi = k * dxi;
      if (xi > 2 * std::sqrt(kPi) / s) break;
      // ∫ h(x) e^{i x ξ/√π} dx sampled at ξ/√π = 2πk/L; the grid starts at −L/2.
      const double F = dx * (k % 2 ? -1.0 : 1.0) * out[static_cast<std::size_t>(k)].real();
      Eigen::VectorXd v(1);
      v << xi;
      worst = std::max(worst, std::abs(gaussian_transfer_hat(s, 1, v) - F));
      if (k > 0 && zero_at < 0 && prev > 0 && F <= 0) zero_at = xi - dxi * F / (F - prev);
      prev = F;
    }
    const double expected = std::sqrt(kPi) / s;
    if (!(zero_at > 0) || std::abs(zero_at - expected) > dxi) zeros_ok = false;
    zeros += fmt(" %.4f/%.4f", zero_at, expected);
  }
  Outcome o;
  o.pass = worst <= 1e-4 && zeros_ok;
  o.detail = fmt("max |FFT - closed form| %.2e (tol 1e-4); zeros found/expected", worst) + zeros;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"line closed form", line_oracle},
      {"circle field", circle_field},
      {"curvature recovery", curvature},
      {"trace identity", trace_identity},
      {"smooth stability", smooth_stability},
      {"Q_sigma Lipschitz", q_lipschitz},
      {"dendrogram stability", dendrogram_stability},
      {"transport oracles", transport},
      {"convergence", convergence},
      {"clustering", clustering},
      {"CLT variance bound", clt_variance},
      {"transfer function", transfer_fft},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s [%2zu] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
