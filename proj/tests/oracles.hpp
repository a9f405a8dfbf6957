#pragma once

// Test-side reference implementations. Deliberately naive and independent of
// the library code paths they check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cyclic Jacobi rotations. Returns (eigenvalues descending, eigenvectors)
/// with the largest-magnitude entry of each vector positive.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a, int sweeps = 100) {
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });
  Vector vals(n);
  Matrix vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    vals(i) = a(src, src);
    vecs.col(i) = v.col(src);
    Eigen::Index arg = 0;
    vecs.col(i).cwiseAbs().maxCoeff(&arg);
    if (vecs(arg, i) < 0) vecs.col(i) *= -1.0;
  }
  return {vals, vecs};
}

/// Shortest simple-path lengths by exhaustive depth-first enumeration.
/// `graph(i, j)` is +inf when there is no edge.
inline Matrix enumerate_paths(const Matrix& graph) {
  const Eigen::Index n = graph.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix best = Matrix::Constant(n, n, inf);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<void(Eigen::Index, Eigen::Index, double)> walk = [&](Eigen::Index src, Eigen::Index at, double len) {
    best(src, at) = std::min(best(src, at), len);
    for (Eigen::Index nxt = 0; nxt < n; ++nxt) {
      if (used[static_cast<std::size_t>(nxt)] || !std::isfinite(graph(at, nxt)) || nxt == at) continue;
      used[static_cast<std::size_t>(nxt)] = true;
      walk(src, nxt, len + graph(at, nxt));
      used[static_cast<std::size_t>(nxt)] = false;
    }
  };
  for (Eigen::Index s = 0; s < n; ++s) {
    used.assign(static_cast<std::size_t>(n), false);
    used[static_cast<std::size_t>(s)] = true;
    walk(s, s, 0.0);
  }
  return best;
}

/// log N(y; mean, cov) via an explicit inverse and determinant.
inline double gaussian_logpdf(const Vector& y, const Vector& mean, const Matrix& cov) {
  const Eigen::Index n = y.size();
  const Vector r = y - mean;
  const double q = r.dot(cov.inverse() * r);
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + std::log(cov.determinant()) + q);
}

/// Covariance of y_1..y_T under y_t = d_t'(b0 + v .* tb_t) + e_t, tb_t a
/// unit random walk from tb_0 = 0, e_t ~ N(0, s2_t).
inline Matrix tvp_joint_covariance(const Matrix& d, const Vector& sqrt_v, const Vector& s2) {
  const Eigen::Index t = d.rows();
  Matrix cov(t, t);
  for (Eigen::Index a = 0; a < t; ++a) {
    for (Eigen::Index b = 0; b < t; ++b) {
      const Vector la = d.row(a).transpose().cwiseProduct(sqrt_v);
      const Vector lb = d.row(b).transpose().cwiseProduct(sqrt_v);
      cov(a, b) = la.dot(lb) * static_cast<double>(std::min(a, b) + 1);
    }
    cov(a, a) += s2(a);
  }
  return cov;
}

}  // namespace oracle
