#include "infcast/dma/dma.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace infcast;
using Catch::Matchers::WithinAbs;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

void check_on_simplex(const Vector& w) {
  CHECK((w.array() >= 0.0).all());
  CHECK_THAT(w.sum(), WithinAbs(1.0, 1e-12));
}

PredictiveDensity normal(double m, double v) {
  PredictiveDensity p;
  p.mean = Vector::Constant(1, m);
  p.var = Vector::Constant(1, v);
  return p;
}

ForecastRecord rec(const std::string& model, YearMonth t, double lpl, double point = 0.0, int h = 1) {
  ForecastRecord r;
  r.model = model;
  r.target = t;
  r.origin = t - h;
  r.horizon = h;
  r.realized = 0.0;
  r.point = point;
  r.lpl = lpl;
  return r;
}

}  // namespace

TEST_CASE("predict weights") {
  const Vector u = Vector::Constant(4, 0.25);
  for (double d : {0.1, 0.5, 0.9, 1.0}) CHECK((predict_weights(u, d) - u).cwiseAbs().maxCoeff() < 1e-15);
  const Vector w = vec({0.7, 0.2, 0.1});
  CHECK((predict_weights(w, 1.0) - w).cwiseAbs().maxCoeff() < 1e-15);
  const Vector h = predict_weights(vec({0.9, 0.1}), 0.5);
  const double a = std::sqrt(0.9), b = std::sqrt(0.1);
  CHECK_THAT(h(0), WithinAbs(a / (a + b), 1e-15));
  CHECK_THAT(h(0), WithinAbs(0.75, 1e-4));

  const Vector p = predict_weights(vec({0.1, 0.6, 0.3}), 0.8);
  const Vector q = predict_weights(vec({0.3, 0.1, 0.6}), 0.8);
  CHECK_THAT(q(0), WithinAbs(p(2), 1e-15));
  CHECK_THAT(q(1), WithinAbs(p(0), 1e-15));
  CHECK_THAT(q(2), WithinAbs(p(1), 1e-15));

  CHECK(predict_weights(vec({1.0, 0.0}), 0.9)(1) > 0.0);
  CHECK_THROWS_AS(predict_weights(vec({0.0, 0.0}), 0.9), NumericalError);
  CHECK_THROWS_AS(predict_weights(u, 0.0), ValidationError);
  CHECK_THROWS_AS(predict_weights(u, 1.1), ValidationError);
}

TEST_CASE("update weights") {
  const Vector w = vec({0.5, 0.3, 0.2});
  CHECK((update_weights(w, Vector::Constant(3, -2.0)) - w).cwiseAbs().maxCoeff() < 1e-15);
  const Vector dom = update_weights(Vector::Constant(3, 1.0 / 3.0), vec({0.0, std::log(1e-12), std::log(1e-12)}));
  CHECK(dom(0) > 1.0 - 1e-10);
  const Vector s1 = update_weights(w, vec({-1.0, -3.0, -0.5}));
  const Vector s2 = update_weights(w, vec({-1.0 - 700.0, -3.0 - 700.0, -0.5 - 700.0}));
  CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-12);
  const double ninf = -std::numeric_limits<double>::infinity();
  const Vector gone = update_weights(w, vec({ninf, -1.0, -1.0}));
  CHECK(gone(0) == 0.0);
  check_on_simplex(gone);
  CHECK_THROWS_AS(update_weights(w, vec({ninf, ninf, ninf})), NumericalError);
  CHECK_THROWS_AS(update_weights(w, vec({std::nan(""), 0.0, 0.0})), ValidationError);
}

TEST_CASE("delta one is Bayesian model averaging") {
  Rng rng(5);
  Matrix ll(10, 3);
  for (Index i = 0; i < ll.size(); ++i) ll(i) = -1.0 - 2.0 * rng.uniform();
  Vector w = Vector::Constant(3, 1.0 / 3.0);
  for (Index t = 0; t < 10; ++t) {
    w = update_weights(predict_weights(w, 1.0), ll.row(t).transpose());
    check_on_simplex(w);
    Vector prod = Vector::Ones(3);
    for (Index s = 0; s <= t; ++s) prod = prod.cwiseProduct(ll.row(s).transpose().array().exp().matrix());
    prod /= prod.sum();
    CHECK((w - prod).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("combine") {
  const auto a = normal(0.0, 1.0), b = normal(1.5, 0.5);
  const auto single = combine({a}, Vector::Ones(1));
  for (double x : {-1.0, 0.0, 2.0}) CHECK_THAT(log_pred_likelihood(single, x), WithinAbs(log_pred_likelihood(a, x), 1e-15));
  const auto twins = combine({a, a}, vec({0.8, 0.2}));
  for (double x : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    CHECK_THAT(log_pred_likelihood(twins, x), WithinAbs(log_pred_likelihood(a, x), 1e-14));
  }
  const Vector w = vec({0.3, 0.7});
  const auto pool = combine({a, b}, w);
  const double x = 0.4;
  const double direct = std::log(0.3 * std::exp(log_pred_likelihood(a, x)) + 0.7 * std::exp(log_pred_likelihood(b, x)));
  CHECK_THAT(log_pred_likelihood(pool, x), WithinAbs(direct, 1e-14));
  CHECK_THAT(pooled_lpl(w, vec({log_pred_likelihood(a, x), log_pred_likelihood(b, x)})), WithinAbs(direct, 1e-14));
  CHECK_THAT(point_forecast(pool), WithinAbs(0.7 * 1.5, 1e-15));
  auto late = b;
  late.origin = YearMonth{2001, 1};
  CHECK_THROWS_AS(combine({a, late}, w), ValidationError);
  CHECK_THROWS_AS(combine({a, b}, Vector::Ones(1)), ValidationError);
}

TEST_CASE("pool slices") {
  const auto grid = build_grid(GridConfig{});
  PoolSlice all;
  PoolSlice hs_tvp_q5{Prior::horseshoe, true, 5};
  int n_all = 0, n_sel = 0;
  for (const auto& c : grid) {
    n_all += all.matches(c);
    n_sel += hs_tvp_q5.matches(c);
  }
  CHECK(n_all == 102);
  CHECK(n_sel == 8);
  CHECK(hs_tvp_q5.name() == "hs_tvp_q5");
  CHECK(all.name() == "both_both_all");
  const auto back = parse_slice("ssvs_const_all");
  REQUIRE(back);
  CHECK(back->name() == "ssvs_const_all");
  CHECK_FALSE(parse_slice("hs_x_all"));
  CHECK(standard_slices({5, 15, 30}).size() == 36);
}

TEST_CASE("run dma") {
  const YearMonth t0{2005, 1};
  std::vector<ModelCell> grid{*parse_model_id("ar_const_hs"), *parse_model_id("ar_tvp_hs")};

  SECTION("single model pool reproduces the model") {
    std::vector<ForecastRecord> panel;
    for (int i = 0; i < 6; ++i) panel.push_back(rec("ar_const_hs", t0 + i, -1.0 - 0.1 * i, 0.2 * i));
    const auto r = run_dma(panel, {grid[0]}, PoolSlice{}, 1);
    REQUIRE(r.pooled.size() == 6);
    for (int i = 0; i < 6; ++i) {
      CHECK_THAT(r.pooled[static_cast<std::size_t>(i)].lpl, WithinAbs(panel[static_cast<std::size_t>(i)].lpl, 1e-15));
      CHECK_THAT(r.pooled[static_cast<std::size_t>(i)].point, WithinAbs(panel[static_cast<std::size_t>(i)].point, 1e-15));
    }
  }
  SECTION("regime switch") {
    std::vector<ForecastRecord> panel;
    const int half = 36;
    for (int i = 0; i < 2 * half; ++i) {
      const bool first = i < half;
      panel.push_back(rec("ar_const_hs", t0 + i, first ? -0.5 : -1.5));
      panel.push_back(rec("ar_tvp_hs", t0 + i, first ? -1.5 : -0.5));
    }
    const auto r = run_dma(panel, grid, PoolSlice{}, 1, 0.9);
    REQUIRE(r.state.history.size() == static_cast<std::size_t>(2 * half));
    CHECK(r.state.history[half].second(0) > 0.5);
    int flip = -1;
    for (int i = half; i < 2 * half; ++i) {
      check_on_simplex(r.state.history[static_cast<std::size_t>(i)].second);
      if (flip < 0 && r.state.history[static_cast<std::size_t>(i)].second(1) > 0.5) flip = i - half;
    }
    REQUIRE(flip >= 0);
    CHECK(flip <= 12);
    double prev = 0.0;
    for (int i = 1; i < half; ++i) {
      const double w = r.state.history[static_cast<std::size_t>(i)].second(0);
      CHECK(w >= prev - 1e-15);
      prev = w;
    }
  }
  SECTION("missing member forecast decays its weight") {
    std::vector<ForecastRecord> panel;
    for (int i = 0; i < 4; ++i) {
      panel.push_back(rec("ar_const_hs", t0 + i, -1.0));
      auto r = rec("ar_tvp_hs", t0 + i, -1.0);
      if (i == 1) {
        r.ok = false;
        r.lpl = std::nan("");
      }
      panel.push_back(r);
    }
    const auto r = run_dma(panel, grid, PoolSlice{}, 1);
    CHECK(r.missing_member_forecasts == 1);
    CHECK(r.pooled[1].ok);
    CHECK_THAT(r.pooled[1].lpl, WithinAbs(-1.0, 1e-15));
    CHECK(r.state.history[2].second(1) < 1e-6);
    CHECK(r.state.history[3].second(1) > r.state.history[2].second(1));
  }
  SECTION("longer horizons use the posterior known at the origin") {
    std::vector<ForecastRecord> panel;
    for (int i = 0; i < 6; ++i) {
      panel.push_back(rec("ar_const_hs", t0 + i, -0.5, 0.0, 3));
      panel.push_back(rec("ar_tvp_hs", t0 + i, -2.0, 0.0, 3));
    }
    const auto r = run_dma(panel, grid, PoolSlice{}, 3);
    for (int i = 0; i < 3; ++i) CHECK(r.state.history[static_cast<std::size_t>(i)].second(0) == 0.5);
    CHECK(r.state.history[3].second(0) > 0.5);
  }
  SECTION("outputs") {
    std::vector<ForecastRecord> panel;
    for (int i = 0; i < 30; ++i) {
      panel.push_back(rec("ar_const_hs", t0 + i, -1.0, 0.1));
      panel.push_back(rec("ar_tvp_hs", t0 + i, -0.9, 0.05));
    }
    const auto r = run_dma(panel, grid, PoolSlice{}, 1);
    std::stringstream hist;
    write_weight_history_csv(hist, r);
    std::string line;
    std::getline(hist, line);
    CHECK(line == "date,ar_const_hs,ar_tvp_hs");
    std::stringstream attr;
    write_attribute_weights_csv(attr, r);
    std::getline(attr, line);
    CHECK(line == "slice,horizon,date,attribute,level,weight");
    std::stringstream table;
    write_dma_table_csv(table, {r}, panel, "ar_const_hs", t0 + 24);
    std::getline(table, line);
    CHECK(line == "slice,lpl_h1,rmse_h1");
    std::getline(table, line);
    CHECK(line.rfind("both_both_all,", 0) == 0);
    CHECK_THROWS_AS(run_dma(panel, grid, PoolSlice{Prior::ssvs, std::nullopt, std::nullopt}, 1), ValidationError);
  }
}
