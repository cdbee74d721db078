#include "covfield/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "covfield/rng.hpp"

namespace covfield {

namespace {

constexpr double kPi = std::numbers::pi;

bool mass_is_one(const Eigen::VectorXd& w) { return std::abs(w.sum() - 1.0) <= 1e-12; }

double angle_between_axes(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

/// Directions θ_k in [0,π) with pairwise axis angle ≥ min_angle.
std::vector<double> separated_angles(Rng& rng, int k, double min_angle) {
  for (;;) {
    std::vector<double> th(k);
    for (auto& t : th) t = rng.uniform(0.0, kPi);
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      for (int j = i + 1; j < k && ok; ++j)
        ok = angle_between_axes(th[i], th[j]) >= min_angle;
    if (ok) return th;
  }
}

Eigen::Vector3d random_unit3(Rng& rng) {
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-8);
  return v.normalized();
}

struct Builder {
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> labels;

  void add(const Eigen::VectorXd& p, int label) {
    pts.push_back(p);
    labels.push_back(label);
  }

  LabeledDataset finish(int dim, std::string description) const {
    Eigen::MatrixXd atoms(dim, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) atoms.col(static_cast<Eigen::Index>(i)) = pts[i];
    LabeledDataset ds;
    ds.measure = make_empirical(std::move(atoms));
    ds.labels = labels;
    ds.description = std::move(description);
    return ds;
  }
};

LabeledDataset gen_lines2d(Rng& rng, const SuiteParams& p) {
  Builder b;
  const auto th = separated_angles(rng, 3, p.min_angle_deg * kPi / 180.0);
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector2d center(rng.uniform(-p.center_half_width, p.center_half_width),
                           rng.uniform(-p.center_half_width, p.center_half_width));
    Eigen::Vector2d u(std::cos(th[c]), std::sin(th[c]));
    const double len = rng.uniform(p.min_length, p.max_length);
    for (int k = 0; k < p.points_per_curve; ++k) {
      const double s = -len / 2 + len * k / (p.points_per_curve - 1);
      Eigen::Vector2d x = center + s * u;
      x += Eigen::Vector2d(rng.normal(0, p.noise_sd), rng.normal(0, p.noise_sd));
      b.add(x, c);
    }
  }
  return b.finish(2, "lines2d");
}

LabeledDataset gen_mixed2d(Rng& rng, const SuiteParams& p) {
  Builder b;
  const auto th = separated_angles(rng, 4, p.min_angle_deg * kPi / 180.0);
  for (int c = 0; c < 4; ++c) {
    Eigen::Vector2d center(rng.uniform(-p.center_half_width, p.center_half_width),
                           rng.uniform(-p.center_half_width, p.center_half_width));
    Eigen::Vector2d u(std::cos(th[c]), std::sin(th[c]));
    Eigen::Vector2d nrm(-u.y(), u.x());
    const double len = rng.uniform(p.min_length, p.max_length);
    // Components 2 and 3 are parabolic arcs y = a s² in the rotated frame,
    // shifted so the arc's chord passes near the center.
    double a = 0.0;
    if (c >= 2) {
      a = rng.uniform(p.parabola_min_curvature, p.parabola_max_curvature) / 2.0;
      if (rng.uniform() < 0.5) a = -a;
    }
    const double lift = a * len * len / 8.0;
    for (int k = 0; k < p.points_per_curve; ++k) {
      const double s = -len / 2 + len * k / (p.points_per_curve - 1);
      Eigen::Vector2d x = center + s * u + (a * s * s - lift) * nrm;
      x += Eigen::Vector2d(rng.normal(0, p.noise_sd), rng.normal(0, p.noise_sd));
      b.add(x, c);
    }
  }
  return b.finish(2, "mixed_curves2d");
}

LabeledDataset gen_planes3d(Rng& rng, const SuiteParams& p) {
  Builder b;
  std::vector<Eigen::Vector3d> normals;
  const double min_angle = p.plane_min_angle_deg * kPi / 180.0;
  while (normals.size() < 3) {
    Eigen::Vector3d n = random_unit3(rng);
    bool ok = true;
    for (const auto& m : normals) {
      const double ang = std::acos(std::min(1.0, std::abs(n.dot(m))));
      ok = ok && ang >= min_angle;
    }
    if (ok) normals.push_back(n);
  }
  const int g = p.plane_grid;
  for (int c = 0; c < 3; ++c) {
    const Eigen::Vector3d& n = normals[c];
    Eigen::Vector3d e1 = n.unitOrthogonal();
    Eigen::Vector3d e2 = n.cross(e1);
    const double rot = rng.uniform(0.0, 2 * kPi);
    const Eigen::Vector3d u = std::cos(rot) * e1 + std::sin(rot) * e2;
    const Eigen::Vector3d v = n.cross(u);
    Eigen::Vector3d center;
    for (int i = 0; i < 3; ++i)
      center[i] = rng.uniform(-p.plane_center_half_width, p.plane_center_half_width);
    const double side = rng.uniform(p.plane_min_side, p.plane_max_side);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        const double s = -side / 2 + side * i / (g - 1);
        const double t = -side / 2 + side * j / (g - 1);
        Eigen::Vector3d x = center + s * u + t * v;
        x += Eigen::Vector3d(rng.normal(0, p.noise_sd), rng.normal(0, p.noise_sd),
                             rng.normal(0, p.noise_sd));
        b.add(x, c);
      }
  }
  return b.finish(3, "planes3d");
}

}  // namespace

void validate(const WeightedMeasure& m) {
  if (m.dim <= 0) throw std::invalid_argument("measure dimension must be positive");
  if (m.atoms.rows() != m.dim) throw std::invalid_argument("atom rows must equal dim");
  if (m.weights.size() != m.atoms.cols())
    throw std::invalid_argument("weights and atoms differ in length");
  if (!m.atoms.allFinite()) throw std::invalid_argument("atoms must be finite");
  for (Eigen::Index i = 0; i < m.weights.size(); ++i)
    if (!(m.weights[i] > 0.0) || !std::isfinite(m.weights[i]))
      throw std::invalid_argument("weights must be positive");
  if (m.normalized && !mass_is_one(m.weights))
    throw std::invalid_argument("normalized flag set but mass differs from 1");
}

WeightedMeasure make_measure(Eigen::MatrixXd atoms, Eigen::VectorXd weights) {
  WeightedMeasure m;
  m.dim = static_cast<int>(atoms.rows());
  m.atoms = std::move(atoms);
  m.weights = std::move(weights);
  m.normalized = false;
  validate(m);
  m.normalized = mass_is_one(m.weights);
  return m;
}

WeightedMeasure make_empirical(Eigen::MatrixXd atoms) {
  const auto n = atoms.cols();
  if (n == 0) throw std::invalid_argument("empirical measure needs at least one atom");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return make_measure(std::move(atoms), std::move(w));
}

WeightedMeasure normalized_copy(const WeightedMeasure& m) {
  Eigen::VectorXd w = m.weights / m.weights.sum();
  return make_measure(m.atoms, std::move(w));
}

void validate(const LabeledDataset& ds) {
  validate(ds.measure);
  if (!ds.labels.empty() && static_cast<Eigen::Index>(ds.labels.size()) != ds.measure.size())
    throw std::invalid_argument("label count differs from atom count");
  for (int l : ds.labels)
    if (l < 0 && l != kOutlierLabel) throw std::invalid_argument("labels must be non-negative");
}

WeightedMeasure quadrature_segment(const Point& a, const Point& b, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  if (a.size() != b.size() || a.size() == 0) throw std::invalid_argument("endpoint dimension mismatch");
  const double len = (b - a).norm();
  if (len == 0.0) throw std::invalid_argument("degenerate segment");
  const auto n = static_cast<Eigen::Index>(std::ceil(len / spacing - 1e-9));
  const Eigen::VectorXd u = (b - a) / len;
  Eigen::MatrixXd atoms(a.size(), n);
  Eigen::VectorXd w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lo = spacing * static_cast<double>(k);
    const double hi = k + 1 == n ? len : lo + spacing;
    atoms.col(k) = a + 0.5 * (lo + hi) * u;
    w[k] = hi - lo;
  }
  return make_measure(std::move(atoms), std::move(w));
}

WeightedMeasure quadrature_circle(double radius, int n_atoms, double phase) {
  if (n_atoms < 3) throw std::invalid_argument("circle quadrature needs at least 3 atoms");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  Eigen::MatrixXd atoms(2, n_atoms);
  for (int k = 0; k < n_atoms; ++k) {
    const double t = phase + 2 * kPi * k / n_atoms;
    atoms(0, k) = radius * std::cos(t);
    atoms(1, k) = radius * std::sin(t);
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_atoms, 2 * kPi * radius / n_atoms);
  return make_measure(std::move(atoms), std::move(w));
}

WeightedMeasure quadrature_sphere(double radius, int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 3) throw std::invalid_argument("invalid sphere grid sizes");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const double dth = kPi / n_theta;
  const double dph = 2 * kPi / n_phi;
  const Eigen::Index n = static_cast<Eigen::Index>(n_theta) * n_phi;
  Eigen::MatrixXd atoms(3, n);
  Eigen::VectorXd w(n);
  Eigen::Index k = 0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = (i + 0.5) * dth;
    const double st = std::sin(th), ct = std::cos(th);
    for (int j = 0; j < n_phi; ++j, ++k) {
      const double ph = j * dph;
      atoms(0, k) = radius * st * std::cos(ph);
      atoms(1, k) = radius * st * std::sin(ph);
      atoms(2, k) = radius * ct;
      w[k] = radius * radius * st * dth * dph;
    }
  }
  return make_measure(std::move(atoms), std::move(w));
}

WeightedMeasure quadrature_disk(double radius, double spacing) {
  if (!(radius > 0.0) || !(spacing > 0.0)) throw std::invalid_argument("radius and spacing must be positive");
  const int m = static_cast<int>(std::ceil(radius / spacing));
  std::vector<Eigen::Vector2d> pts;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      Eigen::Vector2d c((i + 0.5) * spacing, (j + 0.5) * spacing);
      if (c.norm() <= radius) pts.push_back(c);
    }
  if (pts.empty()) throw std::invalid_argument("disk quadrature is empty; reduce spacing");
  Eigen::MatrixXd atoms(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) atoms.col(static_cast<Eigen::Index>(k)) = pts[k];
  return make_empirical(std::move(atoms));
}

WeightedMeasure concatenate(const std::vector<WeightedMeasure>& parts) {
  if (parts.empty()) throw std::invalid_argument("nothing to concatenate");
  const int dim = parts.front().dim;
  Eigen::Index n = 0;
  for (const auto& p : parts) {
    if (p.dim != dim) throw std::invalid_argument("dimension mismatch");
    n += p.size();
  }
  Eigen::MatrixXd atoms(dim, n);
  Eigen::VectorXd w(n);
  Eigen::Index k = 0;
  for (const auto& p : parts) {
    atoms.middleCols(k, p.size()) = p.atoms;
    w.segment(k, p.size()) = p.weights;
    k += p.size();
  }
  return make_measure(std::move(atoms), std::move(w));
}

WeightedMeasure sample_circle_uniform(double radius, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be positive");
  Rng rng(seed);
  Eigen::MatrixXd atoms(2, n);
  for (int k = 0; k < n; ++k) {
    const double t = 2 * kPi * rng.uniform();
    atoms(0, k) = radius * std::cos(t);
    atoms(1, k) = radius * std::sin(t);
  }
  return make_empirical(std::move(atoms));
}

LabeledDataset gen_line_arrangement(const std::vector<LineSpec>& lines, double noise_sd,
                                    int n_outliers, const BoundingBox& box,
                                    std::uint64_t seed) {
  if (lines.empty()) throw std::invalid_argument("empty line specification");
  if (noise_sd < 0.0 || n_outliers < 0) throw std::invalid_argument("noise and outlier count must be non-negative");
  const auto dim = lines.front().a.size();
  for (const auto& l : lines) {
    if (l.n_points < 2) throw std::invalid_argument("each line needs at least 2 points");
    if (l.a.size() != dim || l.b.size() != dim) throw std::invalid_argument("line dimension mismatch");
  }
  if (n_outliers > 0 && (box.lo.size() != dim || box.hi.size() != dim))
    throw std::invalid_argument("bounding box dimension mismatch");

  Rng rng(seed);
  Builder b;
  for (std::size_t c = 0; c < lines.size(); ++c) {
    const auto& l = lines[c];
    for (int k = 0; k < l.n_points; ++k) {
      const double t = static_cast<double>(k) / (l.n_points - 1);
      Eigen::VectorXd x = l.a + t * (l.b - l.a);
      if (noise_sd > 0.0)
        for (Eigen::Index i = 0; i < dim; ++i) x[i] += rng.normal(0.0, noise_sd);
      b.add(x, static_cast<int>(c));
    }
  }
  for (int k = 0; k < n_outliers; ++k) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    b.add(x, kOutlierLabel);
  }
  return b.finish(static_cast<int>(dim), "line arrangement");
}

ArrangementKind parse_arrangement_kind(const std::string& name) {
  if (name == "lines2d") return ArrangementKind::lines2d;
  if (name == "mixed_curves2d" || name == "mixed") return ArrangementKind::mixed_curves2d;
  if (name == "planes3d") return ArrangementKind::planes3d;
  throw std::invalid_argument("unknown arrangement kind: " + name);
}

std::string to_string(ArrangementKind kind) {
  switch (kind) {
    case ArrangementKind::lines2d: return "lines2d";
    case ArrangementKind::mixed_curves2d: return "mixed_curves2d";
    case ArrangementKind::planes3d: return "planes3d";
  }
  return "unknown";
}

std::vector<LabeledDataset> gen_arrangement_suite(ArrangementKind kind, int n_samples,
                                                  std::uint64_t seed,
                                                  const SuiteParams& params) {
  if (n_samples < 1) throw std::invalid_argument("suite needs at least one sample");
  if (params.points_per_curve < 2 || params.plane_grid < 2)
    throw std::invalid_argument("too few points per component");
  std::vector<LabeledDataset> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(replicate_seed(seed, static_cast<std::uint64_t>(s)));
    switch (kind) {
      case ArrangementKind::lines2d: out.push_back(gen_lines2d(rng, params)); break;
      case ArrangementKind::mixed_curves2d: out.push_back(gen_mixed2d(rng, params)); break;
      case ArrangementKind::planes3d: out.push_back(gen_planes3d(rng, params)); break;
    }
  }
  return out;
}

}  // namespace covfield
