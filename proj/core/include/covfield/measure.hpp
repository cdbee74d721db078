#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace covfield {

using Point = Eigen::VectorXd;

/// Finite weighted point measure. Atoms are stored column-wise (dim × n).
struct WeightedMeasure {
  int dim = 0;
  Eigen::MatrixXd atoms;
  Eigen::VectorXd weights;
  bool normalized = false;

  Eigen::Index size() const { return atoms.cols(); }
  auto atom(Eigen::Index i) const { return atoms.col(i); }
  double total_mass() const { return weights.sum(); }
};

/// Validates atoms/weights and sets the normalized flag.
WeightedMeasure make_measure(Eigen::MatrixXd atoms, Eigen::VectorXd weights);
/// Uniform weights 1/n.
WeightedMeasure make_empirical(Eigen::MatrixXd atoms);
void validate(const WeightedMeasure& m);
/// Copy with weights divided by the total mass.
WeightedMeasure normalized_copy(const WeightedMeasure& m);

/// Outliers carry this label in memory; files store kOutlierFileLabel.
inline constexpr int kOutlierLabel = -1;
inline constexpr int kOutlierFileLabel = 2147483647;

struct LabeledDataset {
  WeightedMeasure measure;
  std::vector<int> labels;
  std::string description;
};

void validate(const LabeledDataset& ds);

// Deterministic quadratures of arc-length and surface-area measures.

/// Midpoint rule on [a,b]: sub-intervals of length `spacing`, the last one
/// shortened so the total mass is exactly the segment length.
WeightedMeasure quadrature_segment(const Point& a, const Point& b, double spacing);
/// Atoms at angles phase + 2πk/n, each of weight 2πR/n.
WeightedMeasure quadrature_circle(double radius, int n_atoms, double phase = 0.0);
/// Latitude-longitude grid, θ at cell midpoints, weights R² sinθ Δθ Δφ.
WeightedMeasure quadrature_sphere(double radius, int n_theta, int n_phi);
/// Probability measure on the square grid cells (side `spacing`) whose
/// centers lie in the disk of the given radius.
WeightedMeasure quadrature_disk(double radius, double spacing);
/// Concatenation of measures of the same dimension.
WeightedMeasure concatenate(const std::vector<WeightedMeasure>& parts);

/// n i.i.d. points from the uniform law on the circle, weights 1/n.
WeightedMeasure sample_circle_uniform(double radius, int n, std::uint64_t seed);

struct LineSpec {
  Point a;
  Point b;
  int n_points = 0;
};

struct BoundingBox {
  Point lo;
  Point hi;
};

/// Equally spaced points on each segment (endpoints included), isotropic
/// Gaussian noise per point, then uniform outliers on the box.
LabeledDataset gen_line_arrangement(const std::vector<LineSpec>& lines, double noise_sd,
                                    int n_outliers, const BoundingBox& box,
                                    std::uint64_t seed);

enum class ArrangementKind { lines2d, mixed_curves2d, planes3d };

ArrangementKind parse_arrangement_kind(const std::string& name);
std::string to_string(ArrangementKind kind);

/// Generator defaults for random arrangements. The published experiment does
/// not describe its distributions, so these are documented choices.
struct SuiteParams {
  int points_per_curve = 100;
  double min_length = 1.2;
  double max_length = 2.0;
  double center_half_width = 0.5;
  double min_angle_deg = 20.0;
  double noise_sd = 0.005;
  // Vertex curvature of the parabolic arcs; at most about a quarter turn over the longest arc.
  double parabola_min_curvature = 0.2;
  double parabola_max_curvature = 0.8;
  int plane_grid = 12;
  double plane_min_side = 1.2;
  double plane_max_side = 1.6;
  double plane_center_half_width = 0.3;
  double plane_min_angle_deg = 30.0;
};

/// lines2d: 3 segments; mixed_curves2d: 2 segments and 2 parabolic arcs;
/// planes3d: 3 square plane patches sampled on a uniform grid.
std::vector<LabeledDataset> gen_arrangement_suite(ArrangementKind kind, int n_samples,
                                                  std::uint64_t seed,
                                                  const SuiteParams& params = {});

// Persistence. CSV rows are x_1..x_d,weight[,label] under a mandatory header.

void save_csv(const WeightedMeasure& m, const std::string& path);
void save_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_csv(const std::string& path);
void save_json(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_json(const std::string& path);
/// Chooses the format from the file extension (.json or anything else as CSV).
LabeledDataset load_dataset(const std::string& path);
void save_dataset(const LabeledDataset& ds, const std::string& path);

/// Shortest decimal text with 17 significant digits, exact on reparse.
std::string format_double(double v);

}  // namespace covfield
