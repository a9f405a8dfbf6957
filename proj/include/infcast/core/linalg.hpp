#pragma once

#include "infcast/core/types.hpp"

#include <cmath>
#include <string>

namespace infcast {

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending and
/// eigenvectors in matching columns.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Flip each column so its entry of largest magnitude is positive. Ties go
/// to the lowest row index.
inline void fix_column_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a > best + 1e-14 * std::max(1.0, best)) {
        best = a;
        arg = i;
      }
    }
    if (m.rows() > 0 && m(arg, j) < 0.0) m.col(j) = -m.col(j);
  }
}

inline SpectralDecomposition symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("symmetric_eigen: matrix is not square");
  if (!a.allFinite()) throw NumericalError("symmetric_eigen: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric_eigen: eigensolver failed to converge");
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  fix_column_signs(out.eigenvectors);
  return out;
}

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Cholesky factor of a symmetric matrix, retrying with diagonal jitter when
/// the plain factorization fails. Throws NumericalError if every retry fails.
inline Eigen::LLT<Matrix> robust_cholesky(const Matrix& a, const char* what) {
  Matrix s = symmetrize(a);
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) return llt;
  const double scale = std::max(1e-300, s.diagonal().cwiseAbs().mean());
  for (double jitter = 1e-12; jitter <= 1e-6; jitter *= 100.0) {
    llt.compute(s + Matrix::Identity(s.rows(), s.cols()) * (jitter * scale));
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NumericalError(std::string(what) + ": matrix is not positive definite");
}

inline double sample_mean(const Eigen::Ref<const Vector>& x) { return x.mean(); }

/// Unbiased sample variance (divisor n-1).
inline double sample_variance(const Eigen::Ref<const Vector>& x) {
  if (x.size() < 2) return 0.0;
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace infcast
