#pragma once

#include "infcast/core/linalg.hpp"
#include "infcast/core/types.hpp"
#include "infcast/dimred/factor_matrix.hpp"
#include "infcast/dimred/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace infcast {

/// Random-walk spectral decomposition of a point cloud.
///
/// Affinity w_ij = exp(-||x_i - x_j||^2 / c2), with c2 the median over
/// points of the squared distance to the k-th nearest neighbor. P is the
/// row-normalized affinity. `psi` holds right eigenvectors of P, column s
/// matching `eigenvalues(s)` (descending, so column 0 is the trivial
/// constant pair), scaled so that sum_i p0_i psi_s(i)^2 = 1. With that
/// scaling the n-step diffusion distance equals
/// sum_{s>=1} lambda_s^{2n} (psi_s(i) - psi_s(j))^2.
struct DiffusionEmbedding {
  Matrix affinity;
  Matrix transition;
  Vector stationary;
  Vector eigenvalues;
  Matrix psi;
  double bandwidth = 0.0;
  Index k = 0;

  /// Xi_n coordinates: column s-1 is lambda_s^n psi_s for s = 1..count.
  Matrix coordinates(int n, Index count) const {
    if (count < 1 || count >= psi.cols()) throw ValidationError("diffusion coordinates: count out of range");
    Matrix c(psi.rows(), count);
    for (Index s = 1; s <= count; ++s) c.col(s - 1) = std::pow(eigenvalues(s), n) * psi.col(s);
    return c;
  }
};

/// 1% of the point count, at least one.
inline Index default_diffusion_k(Index n_points) {
  return std::max<Index>(1, static_cast<Index>(std::ceil(0.01 * static_cast<double>(n_points))));
}

/// Points are the rows of `points`. k <= 0 selects default_diffusion_k.
inline DiffusionEmbedding diffusion_embedding(const Matrix& points, Index k = 0) {
  const Index n = points.rows();
  if (n < 3) throw ValidationError("diffusion_map: need at least 3 points");
  if (k <= 0) k = default_diffusion_k(n);
  if (k >= n) throw ValidationError("diffusion_map: k must be below the number of points");

  const Matrix d2 = neighbors::squared_euclidean(points);
  std::vector<double> kth(static_cast<std::size_t>(n));
  const auto nn = neighbors::knn(d2, k);
  for (Index i = 0; i < n; ++i) kth[static_cast<std::size_t>(i)] = d2(i, nn[static_cast<std::size_t>(i)].back());
  std::sort(kth.begin(), kth.end());
  const double c2 = (n % 2 == 1) ? kth[static_cast<std::size_t>(n / 2)]
                                 : 0.5 * (kth[static_cast<std::size_t>(n / 2 - 1)] + kth[static_cast<std::size_t>(n / 2)]);
  if (!(c2 > 0.0)) throw NumericalError("diffusion_map: zero bandwidth (duplicated points)");

  DiffusionEmbedding e;
  e.k = k;
  e.bandwidth = c2;
  e.affinity = d2.unaryExpr([c2](double v) { return std::exp(-v / c2); });
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) off += e.affinity(i, j);
    }
    if (!(off > 0.0)) {
      throw NumericalError("diffusion_map: point " + std::to_string(i) + " has zero affinity to every other point");
    }
  }
  const Vector degree = e.affinity.rowwise().sum();
  e.transition = degree.cwiseInverse().asDiagonal() * e.affinity;
  e.stationary = degree / degree.sum();

  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  const Matrix sym = symmetrize(inv_sqrt.asDiagonal() * e.affinity * inv_sqrt.asDiagonal());
  const SpectralDecomposition eig = symmetric_eigen(sym);
  e.eigenvalues = eig.eigenvalues;
  e.psi = std::sqrt(degree.sum()) * (inv_sqrt.asDiagonal() * eig.eigenvectors);
  fix_column_signs(e.psi);
  return e;
}

/// Diffusion-map factors. Points are the K columns of X; the q leading
/// non-trivial eigenvectors Psi_q (K x q) are projected back to time as
/// Z = X * Psi_q. `n` <= 0 means n = T; it only affects the stored
/// diffusion coordinates.
struct DiffusionMapResult {
  FactorMatrix factors;
  DiffusionEmbedding embedding;
  Matrix coordinates;
};

inline DiffusionMapResult diffusion_map_full(const Matrix& x, Index q, int n = 0, Index k = 0) {
  if (x.cols() < 3) throw ValidationError("diffusion_map: need K >= 3 columns");
  if (q < 1 || q >= x.cols()) throw ValidationError("diffusion_map: q must lie in [1, K-1]");
  if (n <= 0) n = static_cast<int>(x.rows());
  DiffusionMapResult r;
  r.embedding = diffusion_embedding(x.transpose(), k);
  r.coordinates = r.embedding.coordinates(n, q);
  FactorMatrix& f = r.factors;
  f.method = CompressionMethod::diffusion_map;
  f.loadings = r.embedding.psi.middleCols(1, q);
  f.values = x * f.loadings;
  f.eigenvalues = r.embedding.eigenvalues.segment(1, q);
  const double total = r.embedding.eigenvalues.tail(x.cols() - 1).cwiseAbs().sum();
  f.explained_share = total > 0.0 ? Vector(f.eigenvalues.cwiseAbs() / total) : Vector::Zero(q);
  if (!f.values.allFinite()) throw NumericalError("diffusion_map: non-finite factors");
  return r;
}

inline FactorMatrix diffusion_map(const Matrix& x, Index q, int n = 0, Index k = 0) {
  return diffusion_map_full(x, q, n, k).factors;
}

}  // namespace infcast
