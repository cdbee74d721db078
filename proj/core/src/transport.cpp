#include "covfield/transport.hpp"

#include "covfield/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

namespace covfield {

namespace {

void check_inputs(const WeightedMeasure& a, const WeightedMeasure& b, const TransportOptions& opts) {
  if (a.dim != b.dim) throw std::invalid_argument("measures live in different dimensions");
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("measures must have atoms");
  for (const auto* m : {&a, &b}) {
    if (std::abs(m->total_mass() - 1.0) > opts.mass_tolerance)
      throw std::invalid_argument("transport needs probability measures (total mass " +
                                  std::to_string(m->total_mass()) + "); normalize first");
    if (m->size() > opts.max_atoms)
      throw std::invalid_argument("measure has " + std::to_string(m->size()) + " atoms, above the limit of " +
                                  std::to_string(opts.max_atoms) + "; subsample the input");
  }
}

// Transportation simplex on the bipartite graph rows 0..n−1, columns n..n+m−1.
// The basis is a spanning tree with n+m−1 cells, degenerate cells included.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::MatrixXd& cost, Eigen::VectorXd supply, Eigen::VectorXd demand)
      : c_(cost), n_(static_cast<int>(cost.rows())), m_(static_cast<int>(cost.cols())) {
    // Equalize the totals exactly; the caller already checked they agree to 1e-9.
    demand *= supply.sum() / demand.sum();
    initial_basis(supply, demand);
  }

  Eigen::MatrixXd solve() {
    const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
    const double eps = 1e-12 * scale;
    int degenerate_run = 0;
    const long max_iter = 50L * (n_ + m_) * (n_ + m_) + 1000;
    for (long it = 0; it < max_iter; ++it) {
      build_tree();
      const bool bland = degenerate_run > n_ + m_;
      int ei = -1, ej = -1;
      double best = -eps;
      for (int i = 0; i < n_ && !(bland && ei >= 0); ++i)
        for (int j = 0; j < m_; ++j) {
          const double rc = c_(i, j) - pot_[i] - pot_[n_ + j];
          if (rc < best) {
            best = bland ? -eps : rc;
            ei = i;
            ej = j;
            if (bland) break;
          }
        }
      if (ei < 0) return plan();
      degenerate_run = pivot(ei, ej) ? 0 : degenerate_run + 1;
    }
    throw NumericalError("transportation simplex did not terminate");
  }

 private:
  struct Cell {
    int i, j;
    double flow;
  };

  void initial_basis(Eigen::VectorXd s, Eigen::VectorXd d) {
    // North-west corner rule. On a tie the row advances and the column stays
    // with zero remaining demand, which keeps exactly n+m−1 basic cells.
    int i = 0, j = 0;
    while (i < n_ && j < m_) {
      const double q = std::min(s[i], d[j]);
      basis_.push_back({i, j, q});
      s[i] -= q;
      d[j] -= q;
      if (i == n_ - 1) {
        ++j;
      } else if (j == m_ - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void build_tree() {
    const int N = n_ + m_;
    adj_.assign(static_cast<std::size_t>(N), {});
    for (int k = 0; k < static_cast<int>(basis_.size()); ++k) {
      adj_[static_cast<std::size_t>(basis_[k].i)].push_back(k);
      adj_[static_cast<std::size_t>(n_ + basis_[k].j)].push_back(k);
    }
    pot_.assign(static_cast<std::size_t>(N), 0.0);
    parent_edge_.assign(static_cast<std::size_t>(N), -1);
    depth_.assign(static_cast<std::size_t>(N), -1);
    std::vector<int> stack{0};
    depth_[0] = 0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int k : adj_[static_cast<std::size_t>(u)]) {
        const int v = other(k, u);
        if (depth_[static_cast<std::size_t>(v)] >= 0) continue;
        depth_[static_cast<std::size_t>(v)] = depth_[static_cast<std::size_t>(u)] + 1;
        parent_edge_[static_cast<std::size_t>(v)] = k;
        // u_i + v_j = c_ij on basic cells.
        pot_[static_cast<std::size_t>(v)] = c_(basis_[k].i, basis_[k].j) - pot_[static_cast<std::size_t>(u)];
        stack.push_back(v);
      }
    }
  }

  int other(int k, int node) const {
    const int a = basis_[static_cast<std::size_t>(k)].i, b = n_ + basis_[static_cast<std::size_t>(k)].j;
    return node == a ? b : a;
  }

  /// Returns true when the pivot moved a positive amount of mass.
  bool pivot(int ei, int ej) {
    // Tree path from column node to row node; cycle signs alternate −,+,… along it.
    int a = n_ + ej, b = ei;
    std::vector<int> from_a, from_b;
    while (a != b) {
      if (depth_[static_cast<std::size_t>(a)] >= depth_[static_cast<std::size_t>(b)]) {
        const int k = parent_edge_[static_cast<std::size_t>(a)];
        from_a.push_back(k);
        a = other(k, a);
      } else {
        const int k = parent_edge_[static_cast<std::size_t>(b)];
        from_b.push_back(k);
        b = other(k, b);
      }
    }
    std::vector<int> path = from_a;
    path.insert(path.end(), from_b.rbegin(), from_b.rend());
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const auto& cell = basis_[static_cast<std::size_t>(path[p])];
      if (cell.flow < theta || (cell.flow == theta && path[p] < leave)) {
        theta = cell.flow;
        leave = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      auto& cell = basis_[static_cast<std::size_t>(path[p])];
      cell.flow += (p % 2 == 0) ? -theta : theta;
      if (cell.flow < 0) cell.flow = 0;
    }
    basis_[static_cast<std::size_t>(leave)] = {ei, ej, theta};
    return theta > 0;
  }

  Eigen::MatrixXd plan() const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_, m_);
    for (const auto& cell : basis_) p(cell.i, cell.j) += cell.flow;
    return p;
  }

  const Eigen::MatrixXd& c_;
  int n_, m_;
  std::vector<Cell> basis_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> pot_;
  std::vector<int> parent_edge_, depth_;
};

// Dinic max-flow with 64-bit capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : g_(static_cast<std::size_t>(n)), level_(static_cast<std::size_t>(n)),
                            it_(static_cast<std::size_t>(n)) {}

  int add_edge(int u, int v, std::int64_t cap) {
    g_[static_cast<std::size_t>(u)].push_back(static_cast<int>(e_.size()));
    e_.push_back({v, cap});
    g_[static_cast<std::size_t>(v)].push_back(static_cast<int>(e_.size()));
    e_.push_back({u, 0});
    return static_cast<int>(e_.size()) - 2;
  }

  std::int64_t run(int s, int t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (const std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) total += f;
    }
    return total;
  }

  /// Flow carried by the forward edge with the given id.
  std::int64_t flow(int id) const { return e_[static_cast<std::size_t>(id) ^ 1].cap; }

 private:
  struct Edge {
    int to;
    std::int64_t cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int id : g_[static_cast<std::size_t>(u)]) {
        const auto& e = e_[static_cast<std::size_t>(id)];
        if (e.cap > 0 && level_[static_cast<std::size_t>(e.to)] < 0) {
          level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  std::int64_t dfs(int u, int t, std::int64_t pushed) {
    if (u == t) return pushed;
    auto& next = it_[static_cast<std::size_t>(u)];
    const auto& adj = g_[static_cast<std::size_t>(u)];
    for (; next < adj.size(); ++next) {
      const int id = adj[next];
      auto& e = e_[static_cast<std::size_t>(id)];
      if (e.cap <= 0 || level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(u)] + 1) continue;
      if (const std::int64_t f = dfs(e.to, t, std::min(pushed, e.cap))) {
        e.cap -= f;
        e_[static_cast<std::size_t>(id) ^ 1].cap += f;
        return f;
      }
    }
    return 0;
  }

  std::vector<std::vector<int>> g_;
  std::vector<Edge> e_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

/// Weights as integers on a common denominator 2^40 with equal totals.
std::vector<std::int64_t> scaled_weights(const Eigen::VectorXd& w, double total) {
  constexpr double kScale = 1099511627776.0;  // 2^40
  std::vector<std::int64_t> out(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) out[static_cast<std::size_t>(i)] = std::llround(w[i] / total * kScale);
  return out;
}

void balance(std::vector<std::int64_t>& a, std::vector<std::int64_t>& b) {
  std::int64_t sa = 0, sb = 0;
  for (auto v : a) sa += v;
  for (auto v : b) sb += v;
  auto& side = sa < sb ? a : b;
  *std::max_element(side.begin(), side.end()) += std::abs(sa - sb);
}

struct FlowPlan {
  bool feasible = false;
  Eigen::MatrixXd coupling;
};

FlowPlan threshold_flow(const Eigen::MatrixXd& dist, double t, const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b, bool want_plan) {
  const int n = static_cast<int>(dist.rows()), m = static_cast<int>(dist.cols());
  const int s = n + m, sink = n + m + 1;
  MaxFlow mf(n + m + 2);
  std::int64_t total = 0;
  for (int i = 0; i < n; ++i) {
    mf.add_edge(s, i, a[static_cast<std::size_t>(i)]);
    total += a[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < m; ++j) mf.add_edge(n + j, sink, b[static_cast<std::size_t>(j)]);
  std::vector<std::tuple<int, int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (dist(i, j) <= t) edges.emplace_back(mf.add_edge(i, n + j, total), i, j);
  FlowPlan out;
  out.feasible = mf.run(s, sink) == total;
  if (want_plan) {
    out.coupling = Eigen::MatrixXd::Zero(n, m);
    for (const auto& [id, i, j] : edges) out.coupling(i, j) = static_cast<double>(mf.flow(id)) / static_cast<double>(total);
  }
  return out;
}

void fill_costs(TransportPlan& plan, const Eigen::MatrixXd& dist) {
  plan.cost_w1 = (plan.coupling.array() * dist.array()).sum();
  plan.max_edge = 0.0;
  for (Eigen::Index i = 0; i < dist.rows(); ++i)
    for (Eigen::Index j = 0; j < dist.cols(); ++j)
      if (plan.coupling(i, j) > 0) plan.max_edge = std::max(plan.max_edge, dist(i, j));
}

}  // namespace

Eigen::MatrixXd cross_distances(const WeightedMeasure& alpha, const WeightedMeasure& beta) {
  if (alpha.dim != beta.dim) throw std::invalid_argument("measures live in different dimensions");
  Eigen::MatrixXd d(alpha.size(), beta.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    for (Eigen::Index j = 0; j < beta.size(); ++j) d(i, j) = (alpha.atoms.col(i) - beta.atoms.col(j)).norm();
  return d;
}

std::pair<double, TransportPlan> w1_exact(const WeightedMeasure& alpha, const WeightedMeasure& beta,
                                          const TransportOptions& opts) {
  check_inputs(alpha, beta, opts);
  const Eigen::MatrixXd dist = cross_distances(alpha, beta);
  TransportSimplex simplex(dist, alpha.weights, beta.weights);
  TransportPlan plan;
  plan.coupling = simplex.solve();
  fill_costs(plan, dist);
  return {plan.cost_w1, std::move(plan)};
}

std::pair<double, TransportPlan> winf_exact(const WeightedMeasure& alpha, const WeightedMeasure& beta,
                                            const TransportOptions& opts) {
  check_inputs(alpha, beta, opts);
  const Eigen::MatrixXd dist = cross_distances(alpha, beta);
  std::vector<double> values(dist.data(), dist.data() + dist.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  auto a = scaled_weights(alpha.weights, alpha.total_mass());
  auto b = scaled_weights(beta.weights, beta.total_mass());
  balance(a, b);
  std::size_t lo = 0, hi = values.size() - 1;  // the largest distance is always feasible
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (threshold_flow(dist, values[mid], a, b, false).feasible)
      hi = mid;
    else
      lo = mid + 1;
  }
  TransportPlan plan;
  plan.coupling = threshold_flow(dist, values[lo], a, b, true).coupling;
  fill_costs(plan, dist);
  return {plan.max_edge, std::move(plan)};
}

void validate(const Correspondence& r) {
  std::vector<char> xs(static_cast<std::size_t>(r.n_source), 0), ys(static_cast<std::size_t>(r.n_target), 0);
  for (const auto& [i, j] : r.pairs) {
    if (i < 0 || i >= r.n_source || j < 0 || j >= r.n_target)
      throw std::invalid_argument("correspondence index out of range");
    xs[static_cast<std::size_t>(i)] = 1;
    ys[static_cast<std::size_t>(j)] = 1;
  }
  if (std::find(xs.begin(), xs.end(), 0) != xs.end() || std::find(ys.begin(), ys.end(), 0) != ys.end())
    throw std::invalid_argument("relation does not cover both sets, so it is not a correspondence");
}

Correspondence identity_correspondence(int n) {
  Correspondence r;
  r.n_source = r.n_target = n;
  for (int i = 0; i < n; ++i) r.pairs.emplace_back(i, i);
  return r;
}

double distortion(const Correspondence& r, const Eigen::MatrixXd& dX, const Eigen::MatrixXd& dY) {
  if (dX.rows() != r.n_source || dX.cols() != r.n_source || dY.rows() != r.n_target || dY.cols() != r.n_target)
    throw std::invalid_argument("metric sizes do not match the correspondence");
  validate(r);
  double worst = 0.0;
  for (const auto& [x, y] : r.pairs)
    for (const auto& [x2, y2] : r.pairs) worst = std::max(worst, std::abs(dX(x, x2) - dY(y, y2)));
  return worst;
}

Correspondence correspondence_from_plan(const TransportPlan& plan, double support_tol) {
  const auto& p = plan.coupling;
  const double top = p.size() ? p.maxCoeff() : 0.0;
  for (double tol = support_tol;; tol /= 10.0) {
    Correspondence r;
    r.n_source = static_cast<int>(p.rows());
    r.n_target = static_cast<int>(p.cols());
    const double cut = tol > 1e-300 ? tol * top : 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j)
        if (p(i, j) > cut) r.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    try {
      validate(r);
      return r;
    } catch (const std::invalid_argument&) {
      if (cut == 0.0) throw;
    }
  }
}

}  // namespace covfield
