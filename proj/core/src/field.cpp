#include "covfield/field.hpp"

#include <cmath>
#include <stdexcept>

#include "covfield/errors.hpp"
#include "covfield/parallel.hpp"
#include "covfield/spatial_grid.hpp"

namespace covfield {

namespace {

void check_dims(const WeightedMeasure& m, const Point& x) {
  if (x.size() != m.dim) throw std::invalid_argument("dimension mismatch between point and measure");
}

/// Adds w K (y−x)(y−x)ᵀ into the upper triangle of acc.
inline void accumulate(const double* y, const double* x, double wk, int d, double* diff, double* acc) {
  for (int i = 0; i < d; ++i) diff[i] = y[i] - x[i];
  int k = 0;
  for (int i = 0; i < d; ++i) {
    const double s = wk * diff[i];
    for (int j = i; j < d; ++j) acc[k++] += s * diff[j];
  }
}

inline double sq_dist(const double* y, const double* x, int d) {
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double t = y[i] - x[i];
    r2 += t * t;
  }
  return r2;
}

CovTensor unpack(const std::vector<double>& acc, int d) {
  CovTensor t(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      t(i, j) = acc[static_cast<std::size_t>(k)];
      t(j, i) = acc[static_cast<std::size_t>(k)];
      ++k;
    }
  return t;
}

template <class Visit>
CovTensor ctf_sum(const WeightedMeasure& m, const ScaledKernel& K, const Point& x, Visit&& visit) {
  const int d = m.dim;
  std::vector<double> acc(static_cast<std::size_t>(d * (d + 1) / 2), 0.0);
  std::vector<double> diff(static_cast<std::size_t>(d));
  const double* xp = x.data();
  const double* base = m.atoms.data();
  const double* w = m.weights.data();
  visit([&](Eigen::Index j) {
    const double* y = base + j * d;
    const double k = K.of_sq(sq_dist(y, xp, d));
    if (k == 0.0) return;
    accumulate(y, xp, w[j] * k, d, diff.data(), acc.data());
  });
  return unpack(acc, d);
}

}  // namespace

CovTensor ctf_at(const WeightedMeasure& measure, const RadialKernel& kernel, const Point& x, double sigma) {
  check_dims(measure, x);
  const ScaledKernel K(kernel, measure.dim, sigma);
  return ctf_sum(measure, K, x, [&](auto&& f) {
    for (Eigen::Index j = 0; j < measure.size(); ++j) f(j);
  });
}

FieldGrid ctf_grid(const WeightedMeasure& measure, const RadialKernel& kernel,
                   const std::vector<Point>& query_points, double sigma, Acceleration acceleration) {
  FieldGrid g;
  g.sigma = sigma;
  g.query_points = query_points;
  for (const auto& q : query_points) check_dims(measure, q);
  const ScaledKernel K(kernel, measure.dim, sigma);
  g.tensors.resize(query_points.size());
  g.frechet_values.resize(query_points.size());

  if (acceleration == Acceleration::indexed) {
    const auto radius = K.support_radius();
    if (!radius) throw std::invalid_argument("indexed evaluation requires a compactly supported kernel");
    const BucketGrid index(measure.atoms, *radius * (1.0 + 1e-9) + 1e-300);
    parallel_for(query_points.size(), [&](std::size_t q) {
      g.tensors[q] = ctf_sum(measure, K, query_points[q], [&](auto&& f) {
        index.for_each_candidate(query_points[q].data(), [&](std::uint32_t j) { f(static_cast<Eigen::Index>(j)); });
      });
      g.frechet_values[q] = g.tensors[q].trace();
    });
  } else {
    parallel_for(query_points.size(), [&](std::size_t q) {
      g.tensors[q] = ctf_sum(measure, K, query_points[q], [&](auto&& f) {
        for (Eigen::Index j = 0; j < measure.size(); ++j) f(j);
      });
      g.frechet_values[q] = g.tensors[q].trace();
    });
  }
  return g;
}

std::vector<Point> square_grid(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double tx = n == 1 ? 0.5 : static_cast<double>(ix) / (n - 1);
      const double ty = n == 1 ? 0.5 : static_cast<double>(iy) / (n - 1);
      pts.push_back(Eigen::Vector2d(lo + (hi - lo) * tx, lo + (hi - lo) * ty));
    }
  return pts;
}

SpectrumSummary spectrum(const CovTensor& t) {
  if (t.rows() != t.cols()) throw std::invalid_argument("tensor must be square");
  const auto d = t.rows();
  SpectrumSummary s;
  s.trace = t.trace();
  if (t.isZero(0.0)) {
    s.eigenvalues = Eigen::VectorXd::Zero(d);
    s.eigenvectors = Eigen::MatrixXd::Identity(d, d);
    s.anisotropy_ratios = Eigen::VectorXd::Zero(d > 0 ? d - 1 : 0);
    return s;
  }
  const Eigen::MatrixXd sym = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const double v = s.eigenvectors(r, c);
      if (std::abs(v) > 1e-14) {
        if (v < 0) s.eigenvectors.col(c) *= -1.0;
        break;
      }
    }
  }
  const double top = s.eigenvalues[d - 1];
  s.anisotropy_ratios = Eigen::VectorXd::Zero(d - 1);
  if (top > 0)
    for (Eigen::Index i = 0; i + 1 < d; ++i) s.anisotropy_ratios[i] = s.eigenvalues[i] / top;
  return s;
}

int dimension_estimate(const SpectrumSummary& s, double threshold) {
  const auto d = s.eigenvalues.size();
  if (d == 0) return 0;
  const double top = s.eigenvalues[d - 1];
  if (!(top > 0)) return 0;
  int count = 0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (s.eigenvalues[i] / top > threshold) ++count;
  return count;
}

}  // namespace covfield
