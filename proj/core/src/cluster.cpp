#include "covfield/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "covfield/parallel.hpp"

namespace covfield {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  int size(int root) const { return size_[static_cast<std::size_t>(root)]; }
  /// Returns the new root.
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    return a;
  }

 private:
  std::vector<int> parent_, size_;
};

/// Components of the MST restricted to edges with keep[e], labelled in order
/// of their smallest point index.
std::vector<int> components(const Dendrogram& dg, const std::vector<char>& keep, int* count) {
  DisjointSets ds(dg.n_leaves);
  for (std::size_t e = 0; e < dg.mst.size(); ++e)
    if (keep[e]) ds.unite(dg.mst[e].u, dg.mst[e].v);
  std::vector<int> labels(static_cast<std::size_t>(dg.n_leaves));
  std::map<int, int> ids;
  for (int i = 0; i < dg.n_leaves; ++i) {
    const auto [it, fresh] = ids.emplace(ds.find(i), static_cast<int>(ids.size()));
    labels[static_cast<std::size_t>(i)] = it->second;
  }
  *count = static_cast<int>(ids.size());
  return labels;
}

double max_kept(const Dendrogram& dg, const std::vector<char>& keep) {
  double h = 0.0;
  for (std::size_t e = 0; e < dg.mst.size(); ++e)
    if (keep[e]) h = std::max(h, dg.mst[e].weight);
  return h;
}

}  // namespace

std::vector<CovTensor> point_tensors(const Eigen::MatrixXd& points, const TensorizedMetricParams& params) {
  if (!(params.gamma >= 0)) throw std::invalid_argument("gamma must be non-negative");
  if (!(params.sigma > 0)) throw std::invalid_argument("sigma must be positive");
  const WeightedMeasure ref = params.reference ? *params.reference : make_empirical(points);
  if (ref.dim != points.rows()) throw std::invalid_argument("reference measure and points differ in dimension");
  std::vector<Point> queries;
  queries.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.cols(); ++i) queries.emplace_back(points.col(i));
  const auto accel = params.kernel.compact_support_radius_sq() && points.rows() <= 3 ? Acceleration::indexed
                                                                                     : Acceleration::exact;
  return ctf_grid(ref, params.kernel, queries, params.sigma, accel).tensors;
}

Eigen::MatrixXd tensorized_distances(const Eigen::MatrixXd& points, const std::vector<CovTensor>& tensors,
                                     double gamma) {
  const auto n = points.cols();
  if (static_cast<Eigen::Index>(tensors.size()) != n) throw std::invalid_argument("one tensor per point");
  const auto d = points.rows();
  // Flatten tensors so each pair costs one contiguous pass.
  Eigen::MatrixXd flat(d * d, n);
  for (Eigen::Index i = 0; i < n; ++i)
    flat.col(i) = Eigen::Map<const Eigen::VectorXd>(tensors[static_cast<std::size_t>(i)].data(), d * d);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  const double g2 = gamma * gamma;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double t = (flat.col(i) - flat.col(j)).squaredNorm();
      const double s = g2 > 0 ? (points.col(i) - points.col(j)).squaredNorm() : 0.0;
      out(j, i) = std::sqrt(t + g2 * s);
    }
  });
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

Eigen::MatrixXd tensorized_distances(const Eigen::MatrixXd& points, const TensorizedMetricParams& params) {
  return tensorized_distances(points, point_tensors(points, params), params.gamma);
}

Dendrogram single_linkage(const Eigen::MatrixXd& metric) {
  if (metric.rows() != metric.cols()) throw std::invalid_argument("metric matrix must be square");
  const int n = static_cast<int>(metric.rows());
  if (n == 0) throw std::invalid_argument("metric matrix is empty");
  if (metric.hasNaN()) throw std::invalid_argument("metric matrix contains NaN");
  Dendrogram dg;
  dg.n_leaves = n;
  // Dense Prim.
  std::vector<double> best(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> from(static_cast<std::size_t>(n), -1);
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  int cur = 0;
  in_tree[0] = 1;
  for (int step = 1; step < n; ++step) {
    int next = -1;
    double w = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (in_tree[static_cast<std::size_t>(j)]) continue;
      const double dj = metric(cur, j);
      if (dj < best[static_cast<std::size_t>(j)]) {
        best[static_cast<std::size_t>(j)] = dj;
        from[static_cast<std::size_t>(j)] = cur;
      }
      if (next < 0 || best[static_cast<std::size_t>(j)] < w) {
        w = best[static_cast<std::size_t>(j)];
        next = j;
      }
    }
    dg.mst.push_back({from[static_cast<std::size_t>(next)], next, w});
    in_tree[static_cast<std::size_t>(next)] = 1;
    cur = next;
  }
  std::stable_sort(dg.mst.begin(), dg.mst.end(),
                   [](const MstEdge& a, const MstEdge& b) { return a.weight < b.weight; });
  DisjointSets ds(n);
  std::vector<int> cluster_id(static_cast<std::size_t>(n));
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  for (const auto& e : dg.mst) {
    const int ra = ds.find(e.u), rb = ds.find(e.v);
    Merge m;
    m.a = std::min(cluster_id[static_cast<std::size_t>(ra)], cluster_id[static_cast<std::size_t>(rb)]);
    m.b = std::max(cluster_id[static_cast<std::size_t>(ra)], cluster_id[static_cast<std::size_t>(rb)]);
    m.height = e.weight;
    m.size = ds.size(ra) + ds.size(rb);
    const int root = ds.unite(ra, rb);
    cluster_id[static_cast<std::size_t>(root)] = n + static_cast<int>(dg.merges.size());
    dg.merges.push_back(m);
  }
  return dg;
}

Eigen::MatrixXd cophenetic_matrix(const Dendrogram& dg) {
  const int n = dg.n_leaves;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};
  DisjointSets ds(n);
  for (const auto& e : dg.mst) {
    const int ra = ds.find(e.u), rb = ds.find(e.v);
    auto& ma = members[static_cast<std::size_t>(ra)];
    auto& mb = members[static_cast<std::size_t>(rb)];
    for (int i : ma)
      for (int j : mb) {
        u(i, j) = e.weight;
        u(j, i) = e.weight;
      }
    const int root = ds.unite(ra, rb);
    auto& keep = members[static_cast<std::size_t>(root)];
    auto& gone = members[static_cast<std::size_t>(root == ra ? rb : ra)];
    keep.insert(keep.end(), gone.begin(), gone.end());
    gone.clear();
    gone.shrink_to_fit();
  }
  return u;
}

ClusterAssignment cut_at_k(const Dendrogram& dg, int k) {
  if (k < 1 || k > dg.n_leaves) throw std::invalid_argument("need 1 ≤ k ≤ number of points");
  const std::size_t m = dg.mst.size();
  std::vector<char> keep(m, 1);
  const std::size_t remove = static_cast<std::size_t>(k - 1);
  ClusterAssignment out;
  if (remove > 0) {
    // mst is sorted ascending, so the largest edges sit at the back.
    const double threshold = dg.mst[m - remove].weight;
    for (std::size_t e = 0; e < m; ++e)
      if (dg.mst[e].weight >= threshold) keep[e] = 0;
  }
  out.labels = components(dg, keep, &out.k);
  out.tie_expanded = out.k > k;
  out.cutoff_height = max_kept(dg, keep);
  return out;
}

ClusterAssignment cut_at_height(const Dendrogram& dg, double h) {
  if (!(h >= 0)) throw std::invalid_argument("cut height must be non-negative");
  std::vector<char> keep(dg.mst.size());
  for (std::size_t e = 0; e < dg.mst.size(); ++e) keep[e] = dg.mst[e].weight <= h;
  ClusterAssignment out;
  out.labels = components(dg, keep, &out.k);
  out.cutoff_height = h;
  return out;
}

CopheneticStats cophenetic_stats(const Dendrogram& dg) {
  if (dg.n_leaves < 2) throw std::invalid_argument("cophenetic statistics need at least two points");
  // Merging clusters of sizes p and q fixes u = height on p·q pairs.
  DisjointSets ds(dg.n_leaves);
  long double s1 = 0, s2 = 0;
  for (const auto& e : dg.mst) {
    const int ra = ds.find(e.u), rb = ds.find(e.v);
    const long double pairs = static_cast<long double>(ds.size(ra)) * ds.size(rb);
    s1 += pairs * e.weight;
    s2 += pairs * e.weight * e.weight;
    ds.unite(ra, rb);
  }
  const long double n = dg.n_leaves;
  const long double total = n * (n - 1) / 2;
  CopheneticStats st;
  st.mean = static_cast<double>(s1 / total);
  st.sd = std::sqrt(std::max(0.0, static_cast<double>(s2 / total) - st.mean * st.mean));
  return st;
}

double mean_cophenetic(const Dendrogram& dg) { return cophenetic_stats(dg).mean; }

ClusterAssignment topk_reassign(const ClusterAssignment& a, const Eigen::MatrixXd& metric, int k) {
  const auto n = static_cast<Eigen::Index>(a.labels.size());
  if (metric.rows() != n || metric.cols() != n) throw std::invalid_argument("metric size does not match labels");
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::map<int, int> counts;
  for (int l : a.labels) ++counts[l];
  if (static_cast<int>(counts.size()) < k)
    throw std::invalid_argument("assignment has fewer than k clusters");
  std::vector<std::pair<int, int>> order(counts.begin(), counts.end());  // (label, count)
  std::stable_sort(order.begin(), order.end(), [](auto& x, auto& y) { return x.second > y.second; });
  std::map<int, int> rank;
  for (int r = 0; r < k; ++r) rank[order[static_cast<std::size_t>(r)].first] = r;
  ClusterAssignment out;
  out.k = k;
  out.cutoff_height = a.cutoff_height;
  out.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = rank.find(a.labels[static_cast<std::size_t>(i)]);
    if (it != rank.end()) {
      out.labels[static_cast<std::size_t>(i)] = it->second;
      kept.push_back(i);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.labels[static_cast<std::size_t>(i)] >= 0) continue;
    Eigen::Index nearest = kept.front();
    for (Eigen::Index j : kept)
      if (metric(i, j) < metric(i, nearest)) nearest = j;
    out.labels[static_cast<std::size_t>(i)] = out.labels[static_cast<std::size_t>(nearest)];
  }
  return out;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  // Shortest augmenting paths on the cost −weight, padded to a square matrix.
  const int rows = static_cast<int>(weight.rows()), cols = static_cast<int>(weight.cols());
  const int n = std::max(rows, cols);
  const double top = weight.size() ? weight.maxCoeff() : 0.0;
  auto cost = [&](int i, int j) { return (i < rows && j < cols) ? top - weight(i, j) : top; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0), v(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> match_col(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    match_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match_col[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match_col[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match_col[static_cast<std::size_t>(j0)] = match_col[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match_col[static_cast<std::size_t>(j)] - 1;
    if (i < rows && j - 1 < cols) row_to_col[static_cast<std::size_t>(i)] = j - 1;
  }
  return row_to_col;
}

double score(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("label vectors differ in length");
  if (predicted.empty()) return 0.0;
  std::map<int, int> pid, tid;
  for (int l : predicted) pid.emplace(l, static_cast<int>(pid.size()));
  for (int l : truth) tid.emplace(l, static_cast<int>(tid.size()));
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pid.size()),
                                                    static_cast<Eigen::Index>(tid.size()));
  for (std::size_t i = 0; i < predicted.size(); ++i) confusion(pid[predicted[i]], tid[truth[i]]) += 1.0;
  const auto match = max_weight_assignment(confusion);
  double correct = 0.0;
  for (std::size_t r = 0; r < match.size(); ++r)
    if (match[r] >= 0) correct += confusion(static_cast<Eigen::Index>(r), match[r]);
  return 1.0 - correct / static_cast<double>(predicted.size());
}

DistortionCheck dendrogram_distortion_check(const Eigen::MatrixXd& dX, const Eigen::MatrixXd& dY,
                                            const Correspondence& r) {
  DistortionCheck out;
  out.dis_base = distortion(r, dX, dY);
  out.dis_ultra = distortion(r, cophenetic_matrix(single_linkage(dX)), cophenetic_matrix(single_linkage(dY)));
  out.passed = out.dis_ultra <= out.dis_base + 1e-9;
  return out;
}

}  // namespace covfield
