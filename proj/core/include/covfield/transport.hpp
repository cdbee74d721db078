#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "covfield/measure.hpp"

namespace covfield {

struct TransportOptions {
  /// Largest atom count accepted on either side.
  Eigen::Index max_atoms = 2000;
  /// Allowed deviation of the total mass from 1.
  double mass_tolerance = 1e-9;
};

/// Coupling between a source with n atoms and a target with m atoms.
struct TransportPlan {
  Eigen::MatrixXd coupling;  // n × m
  double cost_w1 = 0.0;      // Σ π_ij ‖x_i − y_j‖
  double max_edge = 0.0;     // largest distance carrying mass
};

/// Exact W₁ by the transportation simplex.
std::pair<double, TransportPlan> w1_exact(const WeightedMeasure& alpha, const WeightedMeasure& beta,
                                          const TransportOptions& opts = {});

/// Exact W∞: binary search over the sorted pairwise distances, each threshold
/// checked by an integer max-flow. The plan is a witness whose largest
/// supported edge equals the value.
std::pair<double, TransportPlan> winf_exact(const WeightedMeasure& alpha, const WeightedMeasure& beta,
                                            const TransportOptions& opts = {});

/// Euclidean distance matrix between the atoms of two measures.
Eigen::MatrixXd cross_distances(const WeightedMeasure& alpha, const WeightedMeasure& beta);

/// Relation between index sets {0..n_source−1} and {0..n_target−1}.
struct Correspondence {
  std::vector<std::pair<int, int>> pairs;
  int n_source = 0;
  int n_target = 0;
};

/// Throws std::invalid_argument unless every index on both sides is covered.
void validate(const Correspondence& r);

Correspondence identity_correspondence(int n);

/// max |d_X(x,x′) − d_Y(y,y′)| over pairs of pairs in R.
double distortion(const Correspondence& r, const Eigen::MatrixXd& dX, const Eigen::MatrixXd& dY);

/// Pairs carrying more than support_tol · max π. The tolerance is lowered
/// until the pairs cover both index sets.
Correspondence correspondence_from_plan(const TransportPlan& plan, double support_tol = 1e-12);

}  // namespace covfield
