#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/linalg.hpp"
#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/tvp/alpha.hpp"
#include "infcast/tvp/kalman.hpp"
#include "infcast/tvp/model_spec.hpp"
#include "infcast/tvp/priors.hpp"
#include "infcast/tvp/sv.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace infcast {

/// Retained draws of one model. Row s of each matrix is draw s.
struct PosteriorDraws {
  bool tvp = true;
  Prior prior = Prior::horseshoe;
  Index t_len = 0;
  Index m = 0;
  Matrix beta0;       // S x M
  Matrix sqrt_v;      // S x M, zero in constant mode
  Matrix tilde_last;  // S x M, tb_T
  Matrix logvol;      // S x T
  Vector mu, rho, theta2;
  Matrix prior_var;  // S x K, K = 2M (TVP) or M
  Matrix gamma;      // S x K, SSVS only
  Matrix beta_mean;  // T x M posterior mean of beta_t = beta0 + sqrt_v .* tb_t
  std::vector<Matrix> beta_paths;  // T x M per draw when requested

  Index retained() const { return beta0.rows(); }
};

/// Gibbs sampler for the non-centered TVP regression with stochastic
/// volatility. One sweep draws alpha = (beta0, sqrt_v), the normalized
/// states, the log-volatilities and the shrinkage scales, in that order.
class GibbsSampler {
 public:
  GibbsSampler(Vector y, Matrix d, ModelSpec spec)
      : y_(std::move(y)), d_(std::move(d)), spec_(std::move(spec)), rng_(spec_.seed) {
    spec_.validate(d_.cols());
    if (y_.size() != d_.rows()) throw ValidationError("sampler: y and d differ in length");
    if (d_.rows() < 3) throw ValidationError("sampler: need at least three observations");
    if (!y_.allFinite() || !d_.allFinite()) throw ValidationError("sampler: non-finite data");
    const Index m = d_.cols();
    const Index k = spec_.tvp ? 2 * m : m;
    beta0_ = Vector::Zero(m);
    sqrt_v_ = Vector::Zero(m);
    if (spec_.tvp) tilde_ = Matrix::Zero(d_.rows() + 1, m);

    double var_y = sample_variance(y_);
    if (!(var_y > 0.0)) var_y = 1.0;
    sv_.h = Vector::Constant(y_.size(), std::log(var_y));
    sv_.params.rho = 2.0 * spec_.sv.rho_a / (spec_.sv.rho_a + spec_.sv.rho_b) - 1.0;
    sv_.params.mu = (1.0 - sv_.params.rho) * std::log(var_y);
    sv_.params.theta2 = 0.1;

    if (spec_.prior == Prior::horseshoe) {
      hs_ = HorseshoeState(k);
    } else {
      Vector spike = spec_.ssvs.spike_var;
      Vector slab = spec_.ssvs.slab_var;
      if (spike.size() == 0 || slab.size() == 0) {
        const Vector base = ols_coefficient_variances(y_, d_, spec_.ssvs.ridge);
        const Vector scale = spec_.tvp ? Vector((Vector(k) << base, base).finished()) : base;
        if (spike.size() == 0) spike = spec_.ssvs.spike * scale;
        if (slab.size() == 0) slab = spec_.ssvs.slab * scale;
      }
      if (spike.size() != k || slab.size() != k) {
        throw ValidationError("sampler: SSVS variances need " + std::to_string(k) + " entries");
      }
      ssvs_ = make_ssvs_state(spike, slab, spec_.ssvs.inclusion);
    }
  }

  void sweep() {
    const Vector v = prior_variance();
    const Matrix design = alpha_design(d_, tilde_);
    const Vector alpha = draw_alpha(alpha_posterior(y_, design, sv_.h, v), rng_);
    const Index m = d_.cols();
    beta0_ = alpha.head(m);
    if (spec_.tvp) {
      sqrt_v_ = alpha.tail(m);
      tilde_ = ffbs(StateSpaceInputs{y_, d_, beta0_, sqrt_v_, sv_.h}, rng_);
    }
    draw_sv(residuals(), sv_, spec_.sv, rng_);
    const Vector coef = this->alpha();
    if (spec_.prior == Prior::horseshoe) {
      draw_horseshoe(coef, hs_, rng_);
    } else {
      draw_ssvs(coef, ssvs_, rng_);
    }
  }

  /// Replaces the response; used by joint-distribution simulation tests.
  void set_response(const Vector& y) {
    if (y.size() != y_.size()) throw ValidationError("sampler: response length changed");
    y_ = y;
  }

  /// d_t' beta_t for t = 1..T.
  Vector fitted() const {
    Vector f = d_ * beta0_;
    if (spec_.tvp) f += d_.cwiseProduct(tilde_.bottomRows(d_.rows())) * sqrt_v_;
    return f;
  }
  Vector residuals() const { return y_ - fitted(); }

  Vector alpha() const {
    if (!spec_.tvp) return beta0_;
    Vector a(2 * beta0_.size());
    a << beta0_, sqrt_v_;
    return a;
  }
  Vector prior_variance() const {
    return spec_.prior == Prior::horseshoe ? hs_.prior_variance() : ssvs_.prior_variance();
  }

  const Vector& y() const { return y_; }
  const Matrix& d() const { return d_; }
  const ModelSpec& spec() const { return spec_; }
  const Vector& beta0() const { return beta0_; }
  const Vector& sqrt_v() const { return sqrt_v_; }
  const Matrix& tilde() const { return tilde_; }
  const SvState& sv() const { return sv_; }
  const HorseshoeState& horseshoe() const { return hs_; }
  const SsvsState& ssvs() const { return ssvs_; }
  Rng& rng() { return rng_; }

 private:
  Vector y_;
  Matrix d_;
  ModelSpec spec_;
  Rng rng_;
  Vector beta0_;
  Vector sqrt_v_;
  Matrix tilde_;
  SvState sv_;
  HorseshoeState hs_;
  SsvsState ssvs_;
};

inline PosteriorDraws run_mcmc(const Vector& y, const Matrix& d, const ModelSpec& spec) {
  GibbsSampler g(y, d, spec);
  const Index m = d.cols();
  const Index t_len = d.rows();
  const Index k = spec.tvp ? 2 * m : m;
  const Index s_len = spec.mcmc.retained();
  PosteriorDraws out;
  out.tvp = spec.tvp;
  out.prior = spec.prior;
  out.t_len = t_len;
  out.m = m;
  out.beta0.resize(s_len, m);
  out.sqrt_v = Matrix::Zero(s_len, m);
  out.tilde_last = Matrix::Zero(s_len, m);
  out.logvol.resize(s_len, t_len);
  out.mu.resize(s_len);
  out.rho.resize(s_len);
  out.theta2.resize(s_len);
  out.prior_var.resize(s_len, k);
  if (spec.prior == Prior::ssvs) out.gamma.resize(s_len, k);
  out.beta_mean = Matrix::Zero(t_len, m);

  Index s = 0;
  for (int it = 1; it <= spec.mcmc.draws && s < s_len; ++it) {
    try {
      g.sweep();
    } catch (const NumericalError& e) {
      throw NumericalError("mcmc iteration " + std::to_string(it) + ": " + e.what());
    }
    if (it <= spec.mcmc.burn || (it - spec.mcmc.burn) % spec.mcmc.thin != 0) continue;
    const auto& sv = g.sv();
    if (!g.beta0().allFinite() || !g.sqrt_v().allFinite() || !sv.h.allFinite()) {
      throw NumericalError("mcmc iteration " + std::to_string(it) + ": non-finite draw");
    }
    out.beta0.row(s) = g.beta0().transpose();
    out.logvol.row(s) = sv.h.transpose();
    out.mu(s) = sv.params.mu;
    out.rho(s) = sv.params.rho;
    out.theta2(s) = sv.params.theta2;
    out.prior_var.row(s) = g.prior_variance().transpose();
    if (spec.prior == Prior::ssvs) out.gamma.row(s) = g.ssvs().gamma.transpose();
    Matrix path = g.beta0().transpose().replicate(t_len, 1);
    if (spec.tvp) {
      out.sqrt_v.row(s) = g.sqrt_v().transpose();
      out.tilde_last.row(s) = g.tilde().row(t_len);
      path += g.tilde().bottomRows(t_len) * g.sqrt_v().asDiagonal();
    }
    out.beta_mean += path;
    if (spec.store_paths) out.beta_paths.push_back(std::move(path));
    ++s;
  }
  out.beta_mean /= static_cast<double>(s_len);
  return out;
}

/// Long-format audit dump: draw, parameter, value.
inline void write_draws_csv(std::ostream& out, const PosteriorDraws& p, const std::vector<std::string>& names = {}) {
  auto name = [&](Index j) { return j < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(j)] : std::to_string(j + 1); };
  out << "draw,parameter,value\n";
  for (Index s = 0; s < p.retained(); ++s) {
    const std::string ds = std::to_string(s);
    for (Index j = 0; j < p.m; ++j) out << ds << ",beta0[" << name(j) << "]," << csv::format_double(p.beta0(s, j)) << '\n';
    if (p.tvp) {
      for (Index j = 0; j < p.m; ++j) out << ds << ",sqrt_v[" << name(j) << "]," << csv::format_double(p.sqrt_v(s, j)) << '\n';
    }
    out << ds << ",mu_h," << csv::format_double(p.mu(s)) << '\n';
    out << ds << ",rho_h," << csv::format_double(p.rho(s)) << '\n';
    out << ds << ",theta2_h," << csv::format_double(p.theta2(s)) << '\n';
    out << ds << ",logvol_T," << csv::format_double(p.logvol(s, p.t_len - 1)) << '\n';
  }
}

}  // namespace infcast
