#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace covfield {

/// Uniform bucket grid over the columns of a dim × n matrix (dim ≤ 3).
/// With cell size ≥ r, every point within distance r of a query lies in the
/// 3^dim cells around the query's cell.
class BucketGrid {
 public:
  BucketGrid(const Eigen::MatrixXd& points, double cell_size);

  /// Calls fn(j) for every indexed point j in the neighbouring cells of x.
  template <class Fn>
  void for_each_candidate(const double* x, Fn&& fn) const {
    int c[3] = {0, 0, 0};
    for (int i = 0; i < dim_; ++i) c[i] = cell_coord(x[i]);
    const int span1 = dim_ >= 2 ? 1 : 0;
    const int span2 = dim_ >= 3 ? 1 : 0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -span1; b <= span1; ++b)
        for (int e = -span2; e <= span2; ++e) {
          const auto it = cells_.find(key(c[0] + a, c[1] + b, c[2] + e));
          if (it == cells_.end()) continue;
          for (std::uint32_t k = it->second.first; k < it->second.second; ++k) fn(order_[k]);
        }
  }

  double cell_size() const { return cell_; }

 private:
  int cell_coord(double v) const;
  static std::uint64_t key(int a, int b, int c);

  int dim_;
  double cell_;
  std::vector<std::uint32_t> order_;
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> cells_;
};

}  // namespace covfield
