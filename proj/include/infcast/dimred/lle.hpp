#pragma once

#include "infcast/core/linalg.hpp"
#include "infcast/core/types.hpp"
#include "infcast/dimred/factor_matrix.hpp"
#include "infcast/dimred/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace infcast {

/// Reconstruction weights of locally linear embedding. Row i of `omega`
/// holds the weights of point i on its k nearest neighbors; it sums to one
/// and is zero elsewhere.
struct LleWeights {
  Matrix omega;
  std::vector<std::vector<Index>> neighbors;
  double mean_error = 0.0;  // mean ||x_i - sum_j w_ij x_j||^2
};

inline constexpr double kLleRidge = 1e-3;

/// Points are the rows of `points`. The local Gram matrix receives a ridge
/// of kLleRidge * trace(G) / k before solving G w = 1.
inline LleWeights lle_weights(const Matrix& points, Index k) {
  const Index n = points.rows();
  if (k < 1 || k >= n) throw ValidationError("lle: k=" + std::to_string(k) + " must lie in [1, T-1]");
  LleWeights w;
  w.neighbors = neighbors::knn(neighbors::squared_euclidean(points), k);
  w.omega = Matrix::Zero(n, n);
  double err = 0.0;
  Matrix local(k, points.cols());
  for (Index i = 0; i < n; ++i) {
    const auto& nb = w.neighbors[static_cast<std::size_t>(i)];
    for (Index a = 0; a < k; ++a) local.row(a) = points.row(nb[static_cast<std::size_t>(a)]) - points.row(i);
    Matrix gram = local * local.transpose();
    const double tr = gram.trace();
    if (!(tr > 0.0)) throw NumericalError("lle: singular local Gram matrix at point " + std::to_string(i));
    gram.diagonal().array() += kLleRidge * tr / static_cast<double>(k);
    Eigen::LDLT<Matrix> ldlt(gram);
    Vector wi = ldlt.solve(Vector::Ones(k));
    const double s = wi.sum();
    if (ldlt.info() != Eigen::Success || !wi.allFinite() || std::abs(s) < 1e-300) {
      throw NumericalError("lle: singular local Gram matrix at point " + std::to_string(i));
    }
    wi /= s;
    for (Index a = 0; a < k; ++a) w.omega(i, nb[static_cast<std::size_t>(a)]) = wi(a);
    err += (local.transpose() * wi).squaredNorm();
  }
  w.mean_error = err / static_cast<double>(n);
  return w;
}

/// Neighbor count minimizing the mean reconstruction error of the weight
/// fit (each point predicted from its neighbors only) over
/// k in {4, ..., min(20, T-1)}; ties go to the smaller k.
inline Index lle_auto_k(const Matrix& points) {
  const Index hi = std::min<Index>(20, points.rows() - 1);
  const Index lo = std::min<Index>(4, hi);
  if (hi < 1) throw ValidationError("lle: need at least 2 points");
  Index best_k = lo;
  double best = std::numeric_limits<double>::infinity();
  for (Index k = lo; k <= hi; ++k) {
    const double e = lle_weights(points, k).mean_error;
    if (e < best) {
      best = e;
      best_k = k;
    }
  }
  return best_k;
}

/// M = (I - Omega)'(I - Omega).
inline Matrix lle_cost_matrix(const Matrix& omega) {
  const Matrix a = Matrix::Identity(omega.rows(), omega.cols()) - omega;
  return a.transpose() * a;
}

struct LleResult {
  FactorMatrix factors;
  LleWeights weights;
  Matrix cost;
  Vector bottom_eigenvalues;  // q+1 smallest, ascending
  Index k = 0;
};

/// Points are the T time rows of X. k <= 0 selects lle_auto_k. Factors are
/// eigenvectors 2..q+1 from the bottom of M scaled to Z'Z / T = I.
inline LleResult lle_full(const Matrix& x, Index q, Index k = 0) {
  const Index t = x.rows();
  if (q < 1 || q + 1 >= t) throw ValidationError("lle: q must lie in [1, T-2]");
  LleResult r;
  r.k = k > 0 ? k : lle_auto_k(x);
  r.weights = lle_weights(x, r.k);
  r.cost = symmetrize(lle_cost_matrix(r.weights.omega));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r.cost);
  if (solver.info() != Eigen::Success) throw NumericalError("lle: eigensolver failed");
  r.bottom_eigenvalues = solver.eigenvalues().head(q + 1);
  Matrix z = solver.eigenvectors().middleCols(1, q) * std::sqrt(static_cast<double>(t));
  fix_column_signs(z);
  r.factors.method = CompressionMethod::lle;
  r.factors.values = std::move(z);
  r.factors.eigenvalues = r.bottom_eigenvalues.tail(q);
  if (!r.factors.values.allFinite()) throw NumericalError("lle: non-finite factors");
  return r;
}

inline FactorMatrix lle(const Matrix& x, Index q, Index k = 0) { return lle_full(x, q, k).factors; }

}  // namespace infcast
