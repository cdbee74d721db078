#include "covfield/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace covfield {

namespace {
constexpr int kBias = 1 << 20;  // 21 bits per axis
}

BucketGrid::BucketGrid(const Eigen::MatrixXd& points, double cell_size)
    : dim_(static_cast<int>(points.rows())), cell_(cell_size) {
  if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("bucket grid supports dimensions 1 to 3");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  const auto n = points.cols();
  if (n > static_cast<Eigen::Index>(UINT32_MAX)) throw std::invalid_argument("too many points for bucket grid");
  std::vector<std::uint64_t> keys(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    int c[3] = {0, 0, 0};
    for (int i = 0; i < dim_; ++i) c[i] = cell_coord(points(i, j));
    keys[static_cast<std::size_t>(j)] = key(c[0], c[1], c[2]);
  }
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  std::uint32_t start = 0;
  for (std::uint32_t k = 1; k <= order_.size(); ++k) {
    if (k == order_.size() || keys[order_[k]] != keys[order_[start]]) {
      cells_.emplace(keys[order_[start]], std::make_pair(start, k));
      start = k;
    }
  }
}

int BucketGrid::cell_coord(double v) const {
  const double c = std::floor(v / cell_);
  if (!(std::abs(c) < kBias - 2)) throw std::invalid_argument("coordinate out of bucket grid range");
  return static_cast<int>(c);
}

std::uint64_t BucketGrid::key(int a, int b, int c) {
  return (static_cast<std::uint64_t>(a + kBias) << 42) | (static_cast<std::uint64_t>(b + kBias) << 21) |
         static_cast<std::uint64_t>(c + kBias);
}

}  // namespace covfield
