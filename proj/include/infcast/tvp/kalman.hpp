#pragma once

#include "infcast/core/linalg.hpp"
#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace infcast {

/// Normalized-state model
///   y_t = d_t' beta0 + (d_t .* sqrt_v)' tb_t + e_t,  e_t ~ N(0, exp(logvol_t))
///   tb_t = tb_{t-1} + u_t,  u_t ~ N(0, I),  tb_0 = 0.
/// Rows of `d` are d_t for t = 1..T.
struct StateSpaceInputs {
  const Vector& y;
  const Matrix& d;
  const Vector& beta0;
  const Vector& sqrt_v;
  const Vector& logvol;

  void validate() const {
    const Index t = d.rows();
    const Index m = d.cols();
    if (y.size() != t || logvol.size() != t) throw ValidationError("state space: y, d and logvol lengths differ");
    if (beta0.size() != m || sqrt_v.size() != m) throw ValidationError("state space: coefficient length mismatch");
    if (!y.allFinite() || !d.allFinite() || !beta0.allFinite() || !sqrt_v.allFinite() || !logvol.allFinite()) {
      throw ValidationError("state space: non-finite input");
    }
  }
};

namespace detail {

struct FilterOutput {
  std::vector<Vector> mean;  // filtered E[tb_t | y_1..t]
  std::vector<Matrix> cov;
  double log_likelihood = 0.0;
};

inline FilterOutput kalman_filter(const StateSpaceInputs& in, bool keep) {
  in.validate();
  const Index t_len = in.d.rows();
  const Index m = in.d.cols();
  FilterOutput out;
  if (keep) {
    out.mean.reserve(static_cast<std::size_t>(t_len));
    out.cov.reserve(static_cast<std::size_t>(t_len));
  }
  Vector a = Vector::Zero(m);
  Matrix p = Matrix::Zero(m, m);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Index t = 0; t < t_len; ++t) {
    p.diagonal().array() += 1.0;
    const Vector z = in.d.row(t).transpose().cwiseProduct(in.sqrt_v);
    const Vector pz = p * z;
    const double f = z.dot(pz) + std::exp(in.logvol(t));
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw NumericalError("kalman: non-positive innovation variance at t=" + std::to_string(t));
    }
    const double v = in.y(t) - in.d.row(t).dot(in.beta0) - z.dot(a);
    out.log_likelihood += -0.5 * (log2pi + std::log(f) + v * v / f);
    a += pz * (v / f);
    p -= pz * pz.transpose() / f;
    p = symmetrize(p);
    if (keep) {
      out.mean.push_back(a);
      out.cov.push_back(p);
    }
  }
  return out;
}

}  // namespace detail

/// Log density of y_1..y_T with the states integrated out.
inline double kalman_log_likelihood(const StateSpaceInputs& in) { return detail::kalman_filter(in, false).log_likelihood; }

/// Forward filtering, backward sampling. Returns a (T+1) x M matrix whose
/// row 0 is tb_0 = 0 and row t the draw of tb_t.
inline Matrix ffbs(const StateSpaceInputs& in, Rng& rng) {
  const auto f = detail::kalman_filter(in, true);
  const Index t_len = in.d.rows();
  const Index m = in.d.cols();
  Matrix path = Matrix::Zero(t_len + 1, m);
  if (t_len == 0) return path;
  {
    const auto chol = robust_cholesky(f.cov.back(), "ffbs: terminal covariance");
    path.row(t_len) = (f.mean.back() + chol.matrixL() * rng.normal_vector(m)).transpose();
  }
  // tb_t | tb_{t+1}, y_1..t ~ N(m + J (tb_{t+1} - m), J), J = P (P + I)^{-1}.
  for (Index t = t_len - 1; t >= 1; --t) {
    const Matrix& p = f.cov[static_cast<std::size_t>(t - 1)];
    const Vector& mt = f.mean[static_cast<std::size_t>(t - 1)];
    Matrix s = p;
    s.diagonal().array() += 1.0;
    const Eigen::LLT<Matrix> s_chol(s);
    const Matrix j = symmetrize(s_chol.solve(p));
    const Vector mean = mt + j * (path.row(t + 1).transpose() - mt);
    const auto chol = robust_cholesky(j, "ffbs: smoothing covariance");
    path.row(t) = (mean + chol.matrixL() * rng.normal_vector(m)).transpose();
  }
  if (!path.allFinite()) throw NumericalError("ffbs: non-finite state draw");
  return path;
}

}  // namespace infcast
