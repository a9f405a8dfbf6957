#pragma once

#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/tvp/sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace infcast {

/// Normal mixture sum_s w_s N(mean_s, var_s). An empty `weights` vector
/// means equal weights 1 / S.
struct PredictiveDensity {
  Vector mean;
  Vector var;
  Vector weights;
  YearMonth origin;
  int horizon = 1;
  std::string model;

  Index size() const { return mean.size(); }

  double weight(Index s) const { return weights.size() ? weights(s) : 1.0 / static_cast<double>(mean.size()); }

  void validate() const {
    if (mean.size() < 1) throw ValidationError("density: no components");
    if (var.size() != mean.size()) throw ValidationError("density: mean and variance lengths differ");
    if (weights.size() && weights.size() != mean.size()) throw ValidationError("density: weight length mismatch");
    if (!mean.allFinite() || !var.allFinite()) throw NumericalError("density: non-finite component");
    if (!(var.array() > 0.0).all()) throw NumericalError("density: non-positive component variance");
    if (weights.size() && (!(weights.array() >= 0.0).all() || std::abs(weights.sum() - 1.0) > 1e-9)) {
      throw ValidationError("density: weights must lie on the simplex");
    }
  }
};

/// One mixture component per retained draw:
///   beta_{T+1} = beta0 + sqrt_v .* (tb_T + eta),  eta ~ N(0, I)
///   h_{T+1}    = mu + rho h_T + sqrt(theta2) xi,   xi ~ N(0, 1)
/// giving N(d_T' beta_{T+1}, exp(h_{T+1})).
inline PredictiveDensity predictive_density(const PosteriorDraws& draws, const Vector& d_row, Rng& rng) {
  if (d_row.size() != draws.m) throw ValidationError("predictive_density: regressor row has wrong length");
  if (!d_row.allFinite()) throw ValidationError("predictive_density: non-finite regressor row");
  const Index s_len = draws.retained();
  if (s_len < 1) throw ValidationError("predictive_density: no retained draws");
  PredictiveDensity out;
  out.mean.resize(s_len);
  out.var.resize(s_len);
  for (Index s = 0; s < s_len; ++s) {
    Vector beta = draws.beta0.row(s).transpose();
    if (draws.tvp) {
      const Vector state = draws.tilde_last.row(s).transpose() + rng.normal_vector(draws.m);
      beta += draws.sqrt_v.row(s).transpose().cwiseProduct(state);
    }
    const double h = draws.mu(s) + draws.rho(s) * draws.logvol(s, draws.t_len - 1) + std::sqrt(draws.theta2(s)) * rng.normal();
    out.mean(s) = d_row.dot(beta);
    out.var(s) = std::exp(h);
  }
  out.validate();
  return out;
}

/// log sum_s w_s N(x; mean_s, var_s) by log-sum-exp.
inline double log_pred_likelihood(const PredictiveDensity& p, double x) {
  p.validate();
  const double half_log2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double mx = -std::numeric_limits<double>::infinity();
  Vector terms(p.size());
  for (Index s = 0; s < p.size(); ++s) {
    const double r = x - p.mean(s);
    const double w = p.weight(s);
    terms(s) = w > 0.0 ? std::log(w) - half_log2pi - 0.5 * std::log(p.var(s)) - 0.5 * r * r / p.var(s)
                       : -std::numeric_limits<double>::infinity();
    mx = std::max(mx, terms(s));
  }
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (Index s = 0; s < p.size(); ++s) acc += std::exp(terms(s) - mx);
  return mx + std::log(acc);
}

/// Predictive mean.
inline double point_forecast(const PredictiveDensity& p) {
  p.validate();
  double m = 0.0;
  for (Index s = 0; s < p.size(); ++s) m += p.weight(s) * p.mean(s);
  return m;
}

}  // namespace infcast
