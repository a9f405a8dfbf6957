#pragma once

#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/tvp/model_spec.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace infcast {

/// Ten-component normal mixture approximating the log chi^2_1 density
/// (mean -1.2704, variance pi^2 / 2).
namespace sv_mixture {
inline constexpr std::array<double, 10> kProb = {0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                                                 0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
inline constexpr std::array<double, 10> kMean = {1.92677,  1.34744,  0.73504,  0.02266,  -0.85173,
                                                 -1.97278, -3.46788, -5.55246, -8.68384, -14.65};
inline constexpr std::array<double, 10> kVar = {0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                                                0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
}  // namespace sv_mixture

/// h_t = mu + rho h_{t-1} + sqrt(theta2) eta_t with h_1 drawn from the
/// stationary law N(mu / (1 - rho), theta2 / (1 - rho^2)).
struct SvParams {
  double mu = 0.0;
  double rho = 0.667;
  double theta2 = 0.1;

  double stationary_mean() const { return mu / (1.0 - rho); }
  double stationary_var() const { return theta2 / (1.0 - rho * rho); }
};

/// Offset added to squared residuals before taking logs, relative to their
/// mean so that the linearization does not depend on the data scale.
inline double sv_offset(const Vector& resid) {
  const double ms = resid.squaredNorm() / static_cast<double>(std::max<Index>(1, resid.size()));
  return std::max(1e-300, 1e-8 * ms);
}

namespace detail {

inline void draw_sv_indicators(const Vector& ystar, const Vector& h, std::vector<int>& s, Rng& rng) {
  using namespace sv_mixture;
  s.resize(static_cast<std::size_t>(ystar.size()));
  std::array<double, 10> lw{};
  for (Index t = 0; t < ystar.size(); ++t) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 10; ++j) {
      const double r = ystar(t) - h(t) - kMean[j];
      lw[j] = std::log(kProb[j]) - 0.5 * std::log(kVar[j]) - 0.5 * r * r / kVar[j];
      mx = std::max(mx, lw[j]);
    }
    double total = 0.0;
    for (auto& w : lw) total += (w = std::exp(w - mx));
    double u = rng.uniform() * total;
    int pick = 9;
    for (int j = 0; j < 10; ++j) {
      u -= lw[static_cast<std::size_t>(j)];
      if (u <= 0.0) {
        pick = j;
        break;
      }
    }
    s[static_cast<std::size_t>(t)] = pick;
  }
}

/// Scalar FFBS for h given the mixture indicators.
inline Vector draw_sv_path(const Vector& ystar, const std::vector<int>& s, const SvParams& p, Rng& rng) {
  using namespace sv_mixture;
  const Index n = ystar.size();
  Vector m(n), c(n);
  double a = p.stationary_mean();
  double r = p.stationary_var();
  for (Index t = 0; t < n; ++t) {
    if (t > 0) {
      a = p.mu + p.rho * m(t - 1);
      r = p.rho * p.rho * c(t - 1) + p.theta2;
    }
    const auto j = static_cast<std::size_t>(s[static_cast<std::size_t>(t)]);
    const double f = r + kVar[j];
    const double k = r / f;
    m(t) = a + k * (ystar(t) - kMean[j] - a);
    c(t) = r * (1.0 - k);
  }
  Vector h(n);
  h(n - 1) = m(n - 1) + std::sqrt(c(n - 1)) * rng.normal();
  for (Index t = n - 2; t >= 0; --t) {
    const double denom = p.rho * p.rho * c(t) + p.theta2;
    const double g = c(t) * p.rho / denom;
    const double mean = m(t) + g * (h(t + 1) - p.mu - p.rho * m(t));
    const double var = std::max(0.0, c(t) - g * p.rho * c(t));
    h(t) = mean + std::sqrt(var) * rng.normal();
  }
  return h;
}

inline double log_rho_prior(double rho, const SvPriors& pr) {
  return (pr.rho_a - 1.0) * std::log1p(rho) + (pr.rho_b - 1.0) * std::log1p(-rho);
}

inline double log_h1_density(double h1, const SvParams& p) {
  const double v = p.stationary_var();
  const double r = h1 - p.stationary_mean();
  return -0.5 * std::log(v) - 0.5 * r * r / v;
}

/// (mu, rho) | h, theta2: Gaussian proposal from the regression of h_t on
/// (1, h_{t-1}) under the mu prior, truncated to |rho| < 1, corrected by a
/// Metropolis-Hastings step for the Beta prior and the h_1 term.
inline void draw_mu_rho(const Vector& h, SvParams& p, const SvPriors& pr, Rng& rng) {
  const Index n = h.size();
  if (n < 3) return;
  Eigen::Matrix2d xtx = Eigen::Matrix2d::Zero();
  Eigen::Vector2d xty = Eigen::Vector2d::Zero();
  for (Index t = 1; t < n; ++t) {
    const Eigen::Vector2d x(1.0, h(t - 1));
    xtx += x * x.transpose();
    xty += x * h(t);
  }
  Eigen::Matrix2d prec = xtx / p.theta2;
  prec(0, 0) += 1.0 / pr.mu_var;
  Eigen::Vector2d b = xty / p.theta2;
  b(0) += pr.mu_mean / pr.mu_var;
  const Eigen::LLT<Eigen::Matrix2d> llt(prec);
  if (llt.info() != Eigen::Success) return;
  const Eigen::Vector2d mean = llt.solve(b);
  const Eigen::Matrix2d upper = llt.matrixU();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Eigen::Vector2d z(rng.normal(), rng.normal());
    const Eigen::Vector2d prop = mean + upper.triangularView<Eigen::Upper>().solve(z);
    if (std::abs(prop(1)) >= 1.0) continue;
    SvParams cand = p;
    cand.mu = prop(0);
    cand.rho = prop(1);
    const double log_ratio = log_rho_prior(cand.rho, pr) - log_rho_prior(p.rho, pr) + log_h1_density(h(0), cand) -
                             log_h1_density(h(0), p);
    if (std::log(rng.uniform()) < log_ratio) p = cand;
    return;
  }
}

/// theta2 | h, mu, rho: inverse-gamma proposal from the Gaussian terms,
/// corrected for the Gamma prior's exponential factor.
inline void draw_theta2(const Vector& h, SvParams& p, const SvPriors& pr, Rng& rng) {
  const Index n = h.size();
  double ssr = 0.0;
  for (Index t = 1; t < n; ++t) {
    const double r = h(t) - p.mu - p.rho * h(t - 1);
    ssr += r * r;
  }
  const double r1 = h(0) - p.stationary_mean();
  ssr += r1 * r1 * (1.0 - p.rho * p.rho);
  // Gamma(a, b) prior contributes x^{a-1} e^{-b x}; the power is absorbed
  // into the inverse-gamma shape, the exponential handled by MH.
  const double ig_shape = 0.5 * static_cast<double>(n) - pr.theta2_shape;
  if (!(ig_shape > 0.0) || !(ssr > 0.0)) return;
  const double prop = rng.inv_gamma(ig_shape, 0.5 * ssr);
  if (!(prop > 0.0) || !std::isfinite(prop)) return;
  const double log_ratio = -pr.theta2_rate * (prop - p.theta2);
  if (std::log(rng.uniform()) < log_ratio) p.theta2 = prop;
}

}  // namespace detail

/// State of the log-volatility block.
struct SvState {
  Vector h;
  SvParams params;
  std::vector<int> indicators;
};

/// One Gibbs pass: mixture indicators, the log-volatility path, then
/// (mu, rho) and theta2.
inline void draw_sv(const Vector& resid, SvState& st, const SvPriors& pr, Rng& rng) {
  if (resid.size() != st.h.size()) throw ValidationError("draw_sv: residual and log-volatility lengths differ");
  if (!resid.allFinite()) throw NumericalError("draw_sv: non-finite residuals");
  const double c = sv_offset(resid);
  const Vector ystar = resid.unaryExpr([c](double e) { return std::log(e * e + c); });
  detail::draw_sv_indicators(ystar, st.h, st.indicators, rng);
  st.h = detail::draw_sv_path(ystar, st.indicators, st.params, rng);
  detail::draw_mu_rho(st.h, st.params, pr, rng);
  detail::draw_theta2(st.h, st.params, pr, rng);
  if (!st.h.allFinite()) throw NumericalError("draw_sv: non-finite log-volatility draw");
}

}  // namespace infcast
