#pragma once

#include "infcast/core/linalg.hpp"
#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"

#include <cmath>

namespace infcast {

/// Regressors of the non-centered observation equation, D_t = [d_t, tb_t .* d_t].
/// `tilde` is (T+1) x M with row 0 = tb_0. An empty `tilde` gives the
/// constant-parameter design D_t = d_t.
inline Matrix alpha_design(const Matrix& d, const Matrix& tilde) {
  if (tilde.size() == 0) return d;
  if (tilde.rows() != d.rows() + 1 || tilde.cols() != d.cols()) throw ValidationError("alpha_design: state shape");
  Matrix out(d.rows(), 2 * d.cols());
  out.leftCols(d.cols()) = d;
  out.rightCols(d.cols()) = d.cwiseProduct(tilde.bottomRows(d.rows()));
  return out;
}

struct AlphaPosterior {
  Vector mean;
  Eigen::LLT<Matrix> precision;  // of V-bar^{-1} = D~'D~ + V-prior^{-1}
};

/// Conditional posterior of alpha in y_t = D_t' alpha + e_t,
/// e_t ~ N(0, exp(logvol_t)), alpha ~ N(0, diag(prior_var)).
inline AlphaPosterior alpha_posterior(const Vector& y, const Matrix& design, const Vector& logvol,
                                      const Vector& prior_var) {
  const Index k = design.cols();
  if (prior_var.size() != k) throw ValidationError("alpha_posterior: prior length mismatch");
  const Vector w = (-logvol).array().exp().matrix();
  Matrix prec = design.transpose() * w.asDiagonal() * design;
  prec.diagonal() += prior_var.cwiseInverse();
  const Vector b = design.transpose() * w.cwiseProduct(y);
  AlphaPosterior post{Vector(), robust_cholesky(prec, "alpha: posterior precision")};
  post.mean = post.precision.solve(b);
  if (!post.mean.allFinite()) throw NumericalError("alpha: non-finite posterior mean");
  return post;
}

inline Vector draw_alpha(const AlphaPosterior& post, Rng& rng) {
  const Vector z = rng.normal_vector(post.mean.size());
  Vector draw = post.mean + post.precision.matrixU().solve(z);
  if (!draw.allFinite()) throw NumericalError("alpha: non-finite draw");
  return draw;
}

}  // namespace infcast
