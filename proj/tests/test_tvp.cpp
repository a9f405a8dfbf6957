#include "infcast/tvp/sampler.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace infcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Matrix normal_matrix(Index r, Index c, Rng& rng) {
  Matrix x(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) x(i, j) = rng.normal();
  return x;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TEST_CASE("alpha conditional") {
  Rng rng(3);
  SECTION("tight prior collapses the draw") {
    const Matrix d = normal_matrix(50, 3, rng);
    const Vector y = d * Vector::Constant(3, 2.0);
    const auto post = alpha_posterior(y, d, Vector::Zero(50), Vector::Constant(3, 1e-12));
    CHECK(draw_alpha(post, rng).cwiseAbs().maxCoeff() < 1e-4);
  }
  SECTION("flat prior recovers noiseless coefficients") {
    const Matrix d = normal_matrix(200, 3, rng);
    Matrix tilde = Matrix::Zero(201, 3);
    for (Index t = 1; t <= 200; ++t) tilde.row(t) = tilde.row(t - 1) + normal_matrix(1, 3, rng);
    const Matrix design = alpha_design(d, tilde);
    Vector truth(6);
    truth << 0.5, -1.0, 2.0, 0.3, 0.0, -0.2;
    const Vector y = design * truth;
    const auto post = alpha_posterior(y, design, Vector::Constant(200, std::log(1e-10)), Vector::Constant(6, 1e8));
    CHECK((post.mean - truth).cwiseAbs().maxCoeff() < 1e-3);
  }
  SECTION("scalar conjugate case") {
    Matrix d(3, 1);
    d << 1.0, 2.0, -0.5;
    Vector y(3);
    y << 0.7, 1.1, -0.4;
    Vector s2(3);
    s2 << 0.5, 1.5, 0.8;
    const double tau2 = 2.0;
    double prec = 1.0 / tau2, num = 0.0;
    for (int t = 0; t < 3; ++t) {
      prec += d(t, 0) * d(t, 0) / s2(t);
      num += d(t, 0) * y(t) / s2(t);
    }
    const auto post = alpha_posterior(y, d, s2.array().log().matrix(), Vector::Constant(1, tau2));
    CHECK_THAT(post.mean(0), WithinAbs(num / prec, 1e-10));
    const Matrix cov = post.precision.solve(Matrix::Identity(1, 1));
    CHECK_THAT(cov(0, 0), WithinAbs(1.0 / prec, 1e-10));
  }
}

TEST_CASE("Kalman likelihood against the dense joint density") {
  Rng rng(9);
  for (Index m : {1, 2}) {
    for (Index t : {3, 5}) {
      const Matrix d = normal_matrix(t, m, rng);
      const Vector beta0 = normal_matrix(m, 1, rng).col(0);
      const Vector sv = normal_matrix(m, 1, rng).col(0);
      const Vector h = 0.3 * normal_matrix(t, 1, rng).col(0);
      const Vector y = normal_matrix(t, 1, rng).col(0);
      const double kf = kalman_log_likelihood({y, d, beta0, sv, h});
      const Matrix cov = oracle::tvp_joint_covariance(d, sv, h.array().exp().matrix());
      CHECK_THAT(kf, WithinAbs(oracle::gaussian_logpdf(y, d * beta0, cov), 1e-8));
    }
  }
}

TEST_CASE("FFBS with zero loadings samples the random-walk prior") {
  Rng rng(1);
  const Matrix d = normal_matrix(5, 2, rng);
  const Vector y = normal_matrix(5, 1, rng).col(0);
  const Vector b0 = Vector::Zero(2), sv = Vector::Zero(2), h = Vector::Zero(5);
  std::vector<double> last;
  for (int r = 0; r < 4000; ++r) {
    const Matrix path = ffbs({y, d, b0, sv, h}, rng);
    CHECK(path.row(0).isZero());
    last.push_back(path(5, 0));
  }
  double m = 0, v = 0;
  for (double x : last) m += x;
  m /= static_cast<double>(last.size());
  for (double x : last) v += (x - m) * (x - m);
  v /= static_cast<double>(last.size() - 1);
  CHECK(std::abs(m) < 0.15);
  CHECK_THAT(v, WithinRel(5.0, 0.08));
}

TEST_CASE("stochastic volatility block") {
  SECTION("zero residuals stay finite") {
    Rng rng(4);
    SvState st{Vector::Zero(20), {}, {}};
    Vector e = 0.1 * normal_matrix(20, 1, rng).col(0);
    e(3) = 0.0;
    draw_sv(e, st, SvPriors{}, rng);
    CHECK(st.h.allFinite());
    const Vector z = Vector::Zero(20);
    draw_sv(z, st, SvPriors{}, rng);
    CHECK(st.h.allFinite());
  }
  SECTION("constant volatility recovered") {
    Rng rng(21);
    const Index t = 300;
    const double sigma2 = 0.25;
    const Vector e = std::sqrt(sigma2) * normal_matrix(t, 1, rng).col(0);
    SvState st{Vector::Constant(t, std::log(e.squaredNorm() / t)), {}, {}};
    Vector acc = Vector::Zero(t);
    for (int it = 0; it < 1500; ++it) {
      draw_sv(e, st, SvPriors{}, rng);
      if (it >= 500) acc += st.h.array().exp().matrix();
    }
    acc /= 1000.0;
    const auto inside = ((acc.array() / sigma2 - 1.0).abs() <= 0.25).count();
    CHECK(static_cast<double>(inside) >= 0.8 * t);
    CHECK(std::abs(st.params.rho) < 1.0);
    CHECK(st.params.theta2 > 0.0);
  }
}

TEST_CASE("SSVS inclusion probabilities") {
  CHECK(ssvs_inclusion_probability(0.7, 2.0, 2.0) == 0.5);
  CHECK(ssvs_inclusion_probability(0.0, 0.01, 100.0) < 0.5);
  const double tau0 = 0.01, tau1 = 4.0;
  const double beta = 3.0 * std::sqrt(tau1);
  const double u1 = std::exp(-beta * beta / (2 * tau1)) / std::sqrt(tau1) * 0.5;
  const double u0 = std::exp(-beta * beta / (2 * tau0)) / std::sqrt(tau0) * 0.5;
  CHECK_THAT(ssvs_inclusion_probability(beta, tau0, tau1), WithinAbs(u1 / (u0 + u1), 1e-12));
  // A huge coefficient under a narrow spike stays well defined.
  CHECK(ssvs_inclusion_probability(1e3, 1e-8, 1.0) == 1.0);

  Rng rng(5);
  auto st = make_ssvs_state(Vector::Constant(2, 0.01), Vector::Constant(2, 10.0), 0.5);
  Vector coef(2);
  coef << 0.0, 5.0;
  int on0 = 0, on1 = 0;
  for (int r = 0; r < 2000; ++r) {
    draw_ssvs(coef, st, rng);
    on0 += st.gamma(0) > 0.5;
    on1 += st.gamma(1) > 0.5;
  }
  CHECK(on0 < 200);
  CHECK(on1 == 2000);
}

TEST_CASE("horseshoe conditionals") {
  SECTION("zero coefficients pull the scales down") {
    Rng rng(8);
    std::vector<double> log_var;
    for (int chain = 0; chain < 400; ++chain) {
      HorseshoeState st(6);
      for (int it = 0; it < 100; ++it) draw_horseshoe(Vector::Zero(6), st, rng);
      log_var.push_back(std::log(st.prior_variance()(0)));
    }
    CHECK(median(log_var) < 0.0);
  }
  SECTION("auxiliary conditional matches its closed form") {
    Rng rng(10);
    const double lambda2 = 0.7;
    const double rate = 1.0 + 1.0 / lambda2;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += 1.0 / rng.inv_gamma(1.0, rate);
    CHECK_THAT(sum / n, WithinRel(1.0 / rate, 0.02));
  }
  SECTION("a large coefficient escapes shrinkage") {
    Rng rng(12);
    HorseshoeState st(10);
    Vector coef = Vector::Zero(10);
    coef(0) = 50.0;
    double shrink = 0.0;
    for (int it = 0; it < 3000; ++it) {
      draw_horseshoe(coef, st, rng);
      if (it >= 1000) shrink += 1.0 / (1.0 + st.prior_variance()(0));
    }
    CHECK(shrink / 2000.0 < 0.1);
  }
  SECTION("marginal prior is symmetric") {
    Rng rng(14);
    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) {
      const auto st = sample_horseshoe_prior(1, rng);
      draws.push_back(std::sqrt(st.prior_variance()(0)) * rng.normal());
    }
    // Quartile (Bowley) skewness: the marginal has no finite moments.
    const double q1 = quantile(draws, 0.25), q2 = quantile(draws, 0.5), q3 = quantile(draws, 0.75);
    CHECK(std::abs((q3 + q1 - 2.0 * q2) / (q3 - q1)) < 0.05);
  }
}

TEST_CASE("OLS scaling for SSVS") {
  Rng rng(2);
  const Matrix d = normal_matrix(40, 3, rng);
  const Vector y = d * Vector::Ones(3) + 0.5 * normal_matrix(40, 1, rng).col(0);
  const Vector v = ols_coefficient_variances(y, d);
  const Vector b = (d.transpose() * d).ldlt().solve(d.transpose() * y);
  const double s2 = (y - d * b).squaredNorm() / 37.0;
  const Vector expect = (d.transpose() * d).inverse().diagonal() * s2;
  CHECK((v - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ols_coefficient_variances(y.head(3), d.topRows(3)).allFinite());
}

TEST_CASE("Gibbs sampler contracts") {
  Rng rng(31);
  const Index t = 120;
  Matrix d(t, 3);
  d << normal_matrix(t, 2, rng), Vector::Ones(t);
  Vector beta(3);
  beta << 1.0, -0.5, 0.2;
  const Vector y = d * beta + 0.3 * normal_matrix(t, 1, rng).col(0);

  ModelSpec spec;
  spec.mcmc = {300, 100, 1};
  spec.seed = 77;
  SECTION("deterministic under a fixed seed") {
    const auto a = run_mcmc(y, d, spec);
    const auto b = run_mcmc(y, d, spec);
    CHECK(a.retained() == 200);
    CHECK(a.beta0 == b.beta0);
    CHECK(a.logvol == b.logvol);
    CHECK(a.sqrt_v == b.sqrt_v);
  }
  SECTION("constant mode") {
    spec.tvp = false;
    spec.prior = Prior::ssvs;
    const auto a = run_mcmc(y, d, spec);
    CHECK(a.sqrt_v.isZero());
    CHECK(a.prior_var.cols() == 3);
    CHECK(a.gamma.rows() == 200);
    CHECK((a.beta0.colwise().mean().transpose() - beta).cwiseAbs().maxCoeff() < 0.15);
  }
  SECTION("non-centered identity") {
    GibbsSampler g(y, d, spec);
    for (int i = 0; i < 5; ++i) g.sweep();
    Vector manual(t);
    for (Index i = 0; i < t; ++i) {
      const Vector beta_t = g.beta0() + g.sqrt_v().cwiseProduct(g.tilde().row(i + 1).transpose());
      manual(i) = d.row(i).dot(beta_t);
    }
    CHECK((g.residuals() - (y - manual)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("budget validation") {
    spec.mcmc = {100, 100, 1};
    CHECK_THROWS_AS(run_mcmc(y, d, spec), ValidationError);
  }
}

TEST_CASE("constant coefficients shrink the state variances") {
  Rng rng(41);
  const Index t = 200;
  Matrix d(t, 3);
  d << normal_matrix(t, 2, rng), Vector::Ones(t);
  Vector beta(3);
  beta << 1.0, -1.0, 0.5;
  const Vector y = d * beta + 0.5 * normal_matrix(t, 1, rng).col(0);
  ModelSpec spec;
  spec.mcmc = {1500, 500, 1};
  spec.seed = 3;
  for (Prior prior : {Prior::horseshoe, Prior::ssvs}) {
    spec.prior = prior;
    const auto post = run_mcmc(y, d, spec);
    for (Index j = 0; j < 3; ++j) {
      std::vector<double> a;
      for (Index s = 0; s < post.retained(); ++s) a.push_back(std::abs(post.sqrt_v(s, j)));
      CHECK(median(a) < 0.1 * std::abs(beta(j)));
    }
  }
}
