#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "covfield/field.hpp"
#include "covfield/kernel.hpp"
#include "covfield/measure.hpp"
#include "covfield/transport.hpp"

namespace covfield {

struct TensorizedMetricParams {
  double sigma = 0.1;
  double gamma = 0.0;  // 0 gives a pseudo-metric
  RadialKernel kernel = RadialKernel::gaussian();
  /// Measure whose tensors are used; the uniform empirical measure on the
  /// clustered points when absent.
  std::optional<WeightedMeasure> reference;
};

/// Tensors Σ(a_i,σ) at every point, from the reference measure.
std::vector<CovTensor> point_tensors(const Eigen::MatrixXd& points, const TensorizedMetricParams& params);

/// d_ij = (‖Σ_i − Σ_j‖_F² + γ²‖a_i − a_j‖²)^{1/2}
Eigen::MatrixXd tensorized_distances(const Eigen::MatrixXd& points, const TensorizedMetricParams& params);
Eigen::MatrixXd tensorized_distances(const Eigen::MatrixXd& points, const std::vector<CovTensor>& tensors,
                                     double gamma);

struct MstEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Merge in scipy convention: leaves are 0..n−1, merge k creates cluster n+k.
struct Merge {
  int a = 0;
  int b = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  int n_leaves = 0;
  std::vector<MstEdge> mst;    // sorted by weight, ties by discovery order
  std::vector<Merge> merges;   // heights non-decreasing
};

/// Single linkage through a dense Prim minimum spanning tree.
Dendrogram single_linkage(const Eigen::MatrixXd& metric);

/// u(i,j): the largest edge on the MST path between i and j.
Eigen::MatrixXd cophenetic_matrix(const Dendrogram& dendrogram);

struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;
  double cutoff_height = 0.0;
  /// at_k removed tied edges and produced more clusters than requested.
  bool tie_expanded = false;
};

/// Removes the k−1 largest MST edges. Edges tied with the smallest removed one
/// are removed as well, so the result may have k′ ≥ k clusters.
ClusterAssignment cut_at_k(const Dendrogram& dendrogram, int k);
/// Removes every MST edge longer than h.
ClusterAssignment cut_at_height(const Dendrogram& dendrogram, double h);

struct CopheneticStats {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and standard deviation of u over unordered pairs, from merge sizes.
CopheneticStats cophenetic_stats(const Dendrogram& dendrogram);
double mean_cophenetic(const Dendrogram& dendrogram);

/// Keeps the k largest clusters (ties to the lower label) relabelled 0..k−1 by
/// size; every other point joins the cluster of its nearest kept point.
ClusterAssignment topk_reassign(const ClusterAssignment& assignment, const Eigen::MatrixXd& metric, int k);

/// Misclassification rate under the best matching between predicted and true
/// labels. Points whose cluster is left unmatched count as errors.
double score(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Maximum-weight assignment of rows to columns of a non-negative matrix;
/// entry i is the column of row i or −1.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

struct DistortionCheck {
  double dis_base = 0.0;
  double dis_ultra = 0.0;
  bool passed = false;
};

DistortionCheck dendrogram_distortion_check(const Eigen::MatrixXd& dX, const Eigen::MatrixXd& dY,
                                            const Correspondence& r);

}  // namespace covfield
