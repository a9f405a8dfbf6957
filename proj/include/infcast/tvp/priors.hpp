#pragma once

#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/tvp/model_spec.hpp"

#include <algorithm>
#include <cmath>

namespace infcast {

inline constexpr double kScaleFloor = 1e-300;
inline constexpr double kScaleCeil = 1e300;

inline double clamp_scale(double x) {
  if (std::isnan(x)) throw NumericalError("shrinkage: NaN scale draw");
  return std::clamp(x, kScaleFloor, kScaleCeil);
}

/// Horseshoe in the inverse-gamma hierarchy: prior variance of coefficient
/// j is lambda2_j * tau2 with half-Cauchy lambda_j and tau, represented by
/// auxiliaries nu_j and xi.
struct HorseshoeState {
  Vector lambda2;
  Vector nu;
  double tau2 = 1.0;
  double xi = 1.0;

  explicit HorseshoeState(Index n = 0) : lambda2(Vector::Ones(n)), nu(Vector::Ones(n)) {}

  Vector prior_variance() const { return lambda2 * tau2; }
};

/// One pass over the four inverse-gamma conditionals.
inline void draw_horseshoe(const Vector& coef, HorseshoeState& st, Rng& rng) {
  const Index n = coef.size();
  if (st.lambda2.size() != n) throw ValidationError("draw_horseshoe: state size mismatch");
  for (Index j = 0; j < n; ++j) {
    st.lambda2(j) = clamp_scale(rng.inv_gamma(1.0, 1.0 / st.nu(j) + coef(j) * coef(j) / (2.0 * st.tau2)));
  }
  double ss = 0.0;
  for (Index j = 0; j < n; ++j) ss += coef(j) * coef(j) / st.lambda2(j);
  st.tau2 = clamp_scale(rng.inv_gamma(0.5 * (static_cast<double>(n) + 1.0), 1.0 / st.xi + 0.5 * ss));
  for (Index j = 0; j < n; ++j) st.nu(j) = clamp_scale(rng.inv_gamma(1.0, 1.0 + 1.0 / st.lambda2(j)));
  st.xi = clamp_scale(rng.inv_gamma(1.0, 1.0 + 1.0 / st.tau2));
}

/// Draw from the horseshoe prior itself (used by simulation checks).
inline HorseshoeState sample_horseshoe_prior(Index n, Rng& rng) {
  HorseshoeState st(n);
  st.xi = rng.inv_gamma(0.5, 1.0);
  st.tau2 = rng.inv_gamma(0.5, 1.0 / st.xi);
  for (Index j = 0; j < n; ++j) {
    st.nu(j) = rng.inv_gamma(0.5, 1.0);
    st.lambda2(j) = rng.inv_gamma(0.5, 1.0 / st.nu(j));
  }
  return st;
}

/// Spike-and-slab indicators with fixed variances per coefficient.
struct SsvsState {
  Vector spike_var;
  Vector slab_var;
  Vector gamma;  // 0 or 1
  double inclusion = 0.5;

  Vector prior_variance() const {
    return (gamma.array() * slab_var.array() + (1.0 - gamma.array()) * spike_var.array()).matrix();
  }
};

inline SsvsState make_ssvs_state(const Vector& spike_var, const Vector& slab_var, double inclusion) {
  if (spike_var.size() != slab_var.size()) throw ValidationError("ssvs: spike and slab lengths differ");
  if (!(spike_var.array() > 0.0).all() || !(slab_var.array() > 0.0).all()) {
    throw ValidationError("ssvs: spike and slab variances must be positive");
  }
  SsvsState st;
  st.spike_var = spike_var;
  st.slab_var = slab_var;
  st.gamma = Vector::Ones(spike_var.size());
  st.inclusion = inclusion;
  return st;
}

/// P(gamma = 1 | coef) = u1 / (u0 + u1) with
/// u_k = tau_k^{-1} exp(-coef^2 / (2 tau_k^2)) * prior_k, evaluated in logs.
inline double ssvs_inclusion_probability(double coef, double spike_var, double slab_var, double inclusion = 0.5) {
  const double log_u1 = -0.5 * std::log(slab_var) - coef * coef / (2.0 * slab_var) + std::log(inclusion);
  const double log_u0 = -0.5 * std::log(spike_var) - coef * coef / (2.0 * spike_var) + std::log1p(-inclusion);
  const double diff = log_u0 - log_u1;
  if (diff > 0.0) {
    const double e = std::exp(-diff);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(diff));
}

inline void draw_ssvs(const Vector& coef, SsvsState& st, Rng& rng) {
  if (coef.size() != st.gamma.size()) throw ValidationError("draw_ssvs: state size mismatch");
  for (Index j = 0; j < coef.size(); ++j) {
    const double p = ssvs_inclusion_probability(coef(j), st.spike_var(j), st.slab_var(j), st.inclusion);
    st.gamma(j) = rng.bernoulli(p) ? 1.0 : 0.0;
  }
}

/// Diagonal of s^2 (D'D + ridge I)^{-1} from a constant-parameter
/// least-squares fit of y on d. The ridge only applies when T <= M.
inline Vector ols_coefficient_variances(const Vector& y, const Matrix& d, double ridge = 1e-6) {
  const Index t = d.rows();
  const Index m = d.cols();
  Matrix gram = d.transpose() * d;
  const bool wide = t <= m;
  if (wide) gram.diagonal().array() += ridge;
  const Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericalError("ssvs scaling: least-squares system is singular");
  const Vector b = ldlt.solve(d.transpose() * y);
  const Vector r = y - d * b;
  const double dof = wide ? static_cast<double>(t) : static_cast<double>(t - m);
  double s2 = r.squaredNorm() / std::max(1.0, dof);
  if (!(s2 > 0.0)) s2 = std::max(1e-12, y.squaredNorm() / static_cast<double>(std::max<Index>(1, t)));
  Vector var = ldlt.solve(Matrix::Identity(m, m)).diagonal() * s2;
  for (Index j = 0; j < m; ++j) {
    if (!(var(j) > 0.0) || !std::isfinite(var(j))) var(j) = s2;
  }
  return var;
}

}  // namespace infcast
