#include <cmath>
#include <limits>
#include <stdexcept>

#include "covfield/field.hpp"
#include "covfield/parallel.hpp"

namespace covfield {

double frechet_value(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x, double sigma) {
  if (x.size() != measure.dim) throw std::invalid_argument("dimension mismatch between point and measure");
  const ScaledKernel K(kernel, measure.dim, sigma);
  const int d = measure.dim;
  double v = 0.0;
  for (Eigen::Index j = 0; j < measure.size(); ++j) {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double t = measure.atoms(i, j) - x[i];
      r2 += t * t;
    }
    v += measure.weights[j] * r2 * K.of_sq(r2);
  }
  return v;
}

Eigen::VectorXd frechet_gradient(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x,
                                 double sigma, GradientMode mode) {
  if (x.size() != measure.dim) throw std::invalid_argument("dimension mismatch between point and measure");
  const int d = measure.dim;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  if (mode.kind == GradientMode::analytic_gaussian) {
    if (kernel.kind() != KernelKind::gaussian)
      throw std::invalid_argument("analytic gradient is only available for the Gaussian kernel");
    // ∇_x ‖y−x‖² G(y−x) = G (y−x) (‖y−x‖²/σ² − 2)
    const ScaledKernel K(kernel, d, sigma);
    const double inv_s2 = 1.0 / (sigma * sigma);
    Eigen::VectorXd diff(d);
    for (Eigen::Index j = 0; j < measure.size(); ++j) {
      diff = measure.atoms.col(j) - x;
      const double r2 = diff.squaredNorm();
      g += measure.weights[j] * K.of_sq(r2) * (r2 * inv_s2 - 2.0) * diff;
    }
    return g;
  }
  if (!(mode.h > 0)) throw std::invalid_argument("difference step must be positive");
  Point xp = x, xm = x;
  for (int i = 0; i < d; ++i) {
    xp[i] = x[i] + mode.h;
    xm[i] = x[i] - mode.h;
    g[i] = (frechet_value(measure, kernel, xp, sigma) - frechet_value(measure, kernel, xm, sigma)) / (2 * mode.h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

FlowResult flow_to_attractor(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& start,
                             double sigma, const FlowParams& params) {
  if (kernel.kind() != KernelKind::gaussian) throw std::invalid_argument("gradient flow requires the Gaussian kernel");
  const double step0 = params.initial_step > 0 ? params.initial_step : sigma / 10.0;
  FlowResult res;
  res.start = start;
  Point x = start;
  double v = frechet_value(measure, kernel, x, sigma);
  res.path.push_back(x);
  for (int it = 0; it < params.max_iterations; ++it) {
    const Eigen::VectorXd g = frechet_gradient(measure, kernel, x, sigma);
    const double gn = g.norm();
    if (gn < params.tol * std::max(1.0, v)) {
      res.converged = true;
      break;
    }
    // Steps are measured in distance: the first trial moves step0 along −∇V.
    double t = step0 / gn;
    bool moved = false;
    while (t * gn > 1e-15 * std::max(1.0, x.norm())) {
      const Point y = x - t * g;
      const double vy = frechet_value(measure, kernel, y, sigma);
      if (vy <= v - 1e-4 * t * gn * gn) {
        x = y;
        v = vy;
        moved = true;
        break;
      }
      t *= params.backtrack;
    }
    res.iterations = it + 1;
    if (!moved) {
      // No descent possible at machine precision: x is stationary numerically.
      res.converged = true;
      break;
    }
    res.path.push_back(x);
  }
  res.attractor = x;
  // Far from the data V and ∇V vanish together, so a tiny gradient there is
  // an escape toward infinity rather than an attractor.
  if (res.converged) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < measure.size(); ++j)
      nearest = std::min(nearest, (measure.atoms.col(j) - x).norm());
    if (nearest > 4.0 * sigma) res.converged = false;
  }
  return res;
}

std::vector<int> basin_labels(const WeightedMeasure& measure, const RadialKernel& kernel,
                              const std::vector<Point>& starts, double sigma, const FlowParams& params,
                              std::vector<FlowResult>* flows) {
  std::vector<FlowResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    results[i] = flow_to_attractor(measure, kernel, starts[i], sigma, params);
  });
  const double merge = params.merge_radius > 0 ? params.merge_radius : sigma / 100.0;
  std::vector<Point> attractors;
  std::vector<int> labels(starts.size(), -1);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].converged) continue;
    int id = -1;
    for (std::size_t a = 0; a < attractors.size(); ++a)
      if ((attractors[a] - results[i].attractor).norm() <= merge) {
        id = static_cast<int>(a);
        break;
      }
    if (id < 0) {
      id = static_cast<int>(attractors.size());
      attractors.push_back(results[i].attractor);
    }
    labels[i] = id;
    results[i].basin_id = id;
  }
  if (flows) *flows = std::move(results);
  return labels;
}

}  // namespace covfield
