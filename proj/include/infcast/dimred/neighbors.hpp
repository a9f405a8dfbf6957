#pragma once

#include "infcast/core/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace infcast::neighbors {

/// Squared Euclidean distances between the rows of `points`.
inline Matrix squared_euclidean(const Matrix& points) {
  const Vector norms = points.rowwise().squaredNorm();
  Matrix d = (-2.0 * points * points.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

/// Manhattan (L1) distances between the rows of `points`.
inline Matrix manhattan(const Matrix& points) {
  const Index n = points.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v = (points.row(i) - points.row(j)).cwiseAbs().sum();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

/// Indices of the k nearest neighbors of each point (self excluded), nearest
/// first, ties broken by index.
inline std::vector<std::vector<Index>> knn(const Matrix& dist, Index k) {
  const Index n = dist.rows();
  if (k < 1 || k >= n) throw ValidationError("knn: k must lie in [1, n-1]");
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Index{0});
    order.erase(order.begin() + i);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
      return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
    });
    out[static_cast<std::size_t>(i)].assign(order.begin(), order.begin() + k);
    order.resize(static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace infcast::neighbors
