#pragma once

#include "infcast/core/linalg.hpp"
#include "infcast/core/types.hpp"
#include "infcast/dimred/factor_matrix.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace infcast {

/// Generic PCA step: Z = W * Lambda(kappa) where Lambda holds the leading q
/// eigenvectors of the K x K matrix kappa.
inline FactorMatrix pca_from_kernel(const Matrix& w, const Matrix& kappa, Index q, CompressionMethod method) {
  if (kappa.rows() != w.cols() || kappa.cols() != w.cols()) throw ValidationError("pca: kernel must be K x K");
  if (q < 1 || q > w.cols()) {
    throw ValidationError("pca: q=" + std::to_string(q) + " outside [1, " + std::to_string(w.cols()) + "]");
  }
  const SpectralDecomposition eig = symmetric_eigen(kappa);
  FactorMatrix f;
  f.method = method;
  f.loadings = eig.eigenvectors.leftCols(q);
  f.values = w * f.loadings;
  f.eigenvalues = eig.eigenvalues.head(q);
  const double trace = eig.eigenvalues.sum();
  f.explained_share = trace != 0.0 ? Vector(f.eigenvalues / trace) : Vector::Zero(q);
  if (!f.values.allFinite()) throw NumericalError("pca: non-finite factors");
  return f;
}

/// W = X, kappa = X'X.
inline FactorMatrix pca_linear(const Matrix& x, Index q) {
  return pca_from_kernel(x, x.transpose() * x, q, CompressionMethod::pca_linear);
}

/// Linear PCA on the element-wise square of X (no re-standardization).
inline FactorMatrix pca_squared(const Matrix& x, Index q) {
  FactorMatrix f = pca_linear(x.cwiseProduct(x), q);
  f.method = CompressionMethod::pca_squared;
  return f;
}

enum class KernelKind { gaussian, polynomial };

/// c0 = sqrt((K + 2) / 2).
inline double default_poly_scale(Index k) { return std::sqrt((static_cast<double>(k) + 2.0) / 2.0); }

/// c1 = sqrt(c_K) / pi with c_K the 95th percentile of chi^2_K.
inline double default_gauss_scale(Index k) {
  const boost::math::chi_squared_distribution<double> chi2(static_cast<double>(k));
  return std::sqrt(boost::math::quantile(chi2, 0.95)) / std::numbers::pi;
}

/// kappa_ij = exp(-||x_i - x_j|| / (2 c1^2)) over column pairs (plain norm,
/// not squared).
inline Matrix gaussian_kernel_matrix(const Matrix& x, double c1) {
  if (!(c1 > 0.0)) throw ValidationError("gaussian kernel: scale must be positive");
  const Index k = x.cols();
  Matrix kappa(k, k);
  for (Index i = 0; i < k; ++i) {
    kappa(i, i) = 1.0;
    for (Index j = i + 1; j < k; ++j) {
      const double v = std::exp(-(x.col(i) - x.col(j)).norm() / (2.0 * c1 * c1));
      kappa(i, j) = v;
      kappa(j, i) = v;
    }
  }
  return kappa;
}

/// kappa_ij = (x_i'x_j / c0^2 + 1)^2 over column pairs.
inline Matrix polynomial_kernel_matrix(const Matrix& x, double c0) {
  if (!(c0 > 0.0)) throw ValidationError("polynomial kernel: scale must be positive");
  Matrix g = x.transpose() * x / (c0 * c0);
  return (g.array() + 1.0).square().matrix();
}

/// Kernel PCA with W = X. `scale` <= 0 selects the default c0 / c1 rule.
inline FactorMatrix kernel_pca(const Matrix& x, Index q, KernelKind kind, double scale = 0.0) {
  if (x.cols() < 2) throw ValidationError("kernel_pca: need K >= 2 columns");
  if (kind == KernelKind::gaussian) {
    const double c1 = scale > 0.0 ? scale : default_gauss_scale(x.cols());
    return pca_from_kernel(x, gaussian_kernel_matrix(x, c1), q, CompressionMethod::pca_gauss_kernel);
  }
  const double c0 = scale > 0.0 ? scale : default_poly_scale(x.cols());
  return pca_from_kernel(x, polynomial_kernel_matrix(x, c0), q, CompressionMethod::pca_poly_kernel);
}

}  // namespace infcast
