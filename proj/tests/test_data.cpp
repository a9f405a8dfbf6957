#include "infcast/data/panel.hpp"
#include "infcast/data/regressors.hpp"
#include "infcast/data/target.hpp"
#include "infcast/data/transforms.hpp"
#include "infcast/data/vintage.hpp"
#include "infcast/data/windows.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace infcast;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<YearMonth> month_range(YearMonth first, int n) {
  std::vector<YearMonth> d;
  for (int i = 0; i < n; ++i) d.push_back(first + i);
  return d;
}

PanelMatrix random_panel(int t, int k, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(3.0, 2.0);
  PanelMatrix p;
  p.values.resize(t, k);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < k; ++j) p.values(i, j) = nd(gen) * (j + 1);
  p.dates = month_range({2000, 1}, t);
  for (int j = 0; j < k; ++j) p.names.push_back("S" + std::to_string(j));
  return p;
}

}  // namespace

TEST_CASE("year-month arithmetic and parsing") {
  const YearMonth a{1999, 12};
  CHECK((a + 1) == YearMonth{2000, 1});
  CHECK((a - 12) == YearMonth{1998, 12});
  CHECK(YearMonth{2018, 12} - YearMonth{2000, 1} == 227);
  CHECK(YearMonth::parse("2001-03") == YearMonth{2001, 3});
  CHECK(YearMonth::parse("2001-03-01") == YearMonth{2001, 3});
  CHECK(YearMonth::parse("3/1/2001") == YearMonth{2001, 3});
  CHECK_THROWS_AS(YearMonth::parse("2001-13"), ValidationError);
  CHECK(a.to_string() == "1999-12");
}

TEST_CASE("transform codes") {
  const double e = std::exp(1.0);
  SECTION("level") {
    CHECK(apply_transform(std::vector<double>{3, 1, 4}, 1) == std::vector<double>{3, 1, 4});
  }
  SECTION("log difference of a geometric series") {
    const auto out = apply_transform(std::vector<double>{1, e, e * e}, 5);
    REQUIRE(out.size() == 2);
    CHECK_THAT(out[0], WithinAbs(1.0, 1e-14));
    CHECK_THAT(out[1], WithinAbs(1.0, 1e-14));
  }
  SECTION("second log difference") {
    const auto out = apply_transform(std::vector<double>{1, e, e * e * e}, 6);
    REQUIRE(out.size() == 1);
    CHECK_THAT(out[0], WithinAbs(1.0, 1e-14));
  }
  SECTION("trend families map to constants") {
    std::vector<double> lin, geo, quad_log;
    for (int t = 0; t < 12; ++t) {
      lin.push_back(2.0 + 0.5 * t);
      geo.push_back(3.0 * std::pow(1.01, t));
      quad_log.push_back(std::exp(0.01 * t * t));
    }
    for (double v : apply_transform(lin, 2)) CHECK_THAT(v, WithinAbs(0.5, 1e-12));
    for (double v : apply_transform(geo, 5)) CHECK_THAT(v, WithinAbs(std::log(1.01), 1e-12));
    for (double v : apply_transform(quad_log, 6)) CHECK_THAT(v, WithinAbs(0.02, 1e-12));
    for (double v : apply_transform(geo, 7)) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
    CHECK(apply_transform(geo, 4).size() == geo.size());
  }
  SECTION("errors") {
    CHECK_THROWS_AS(apply_transform(std::vector<double>{1, 0, 2}, 5), ValidationError);
    CHECK_THROWS_AS(apply_transform(std::vector<double>{1, 2}, 6), ValidationError);
    CHECK_THROWS_AS(apply_transform(std::vector<double>{1, 2}, 3), ValidationError);
  }
}

TEST_CASE("standardize") {
  PanelMatrix p;
  p.values = Matrix(3, 1);
  p.values << 1, 2, 3;
  p.names = {"A"};
  p.dates = month_range({2000, 1}, 3);
  const auto s = standardize(p);
  CHECK_THAT(s.values(0, 0), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(s.values(1, 0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(s.values(2, 0), WithinAbs(1.0, 1e-15));

  const auto r = standardize(random_panel(5, 3, 7));
  for (Index j = 0; j < 3; ++j) {
    const Vector c = r.values.col(j);
    const double mean = c.sum() / 5.0;
    const double var = (c.array() - mean).square().sum() / 4.0;
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-8);
  }
  const auto twice = standardize(r);
  CHECK((twice.values - r.values).cwiseAbs().maxCoeff() < 1e-12);

  p.values << 4, 4, 4;
  CHECK_THROWS_WITH(standardize(p), ContainsSubstring("'A'"));
}

TEST_CASE("inflation target") {
  std::vector<double> flat(30, 100.0);
  for (int h : {1, 3, 12}) {
    const auto y = build_target(flat, h);
    CHECK(y.size() == 30 - (h + 1));
    CHECK(y.values.cwiseAbs().maxCoeff() == 0.0);
  }
  for (double g : {0.002, 0.01, -0.004}) {
    std::vector<double> cpi;
    for (int t = 0; t < 40; ++t) cpi.push_back(std::exp(g * t));
    for (int h : {1, 3, 12}) {
      const auto y = build_target(cpi, h);
      for (Index i = 0; i < y.size(); ++i) CHECK_THAT(y.values(i), WithinAbs((h - 1) * g, 1e-12));
    }
  }
  CHECK_THROWS_AS(build_target(std::vector<double>{1, 2, 3}, 3), ValidationError);
  CHECK_THROWS_AS(build_target(std::vector<double>{1, -2, 3, 4, 5}, 1), ValidationError);
}

TEST_CASE("regressor layout") {
  SECTION("AR with two lags") {
    TargetSeries y;
    y.values = Vector(4);
    y.values << 1, 2, 3, 4;
    y.horizon = 1;
    y.dates = month_range({2000, 1}, 4);
    const auto r = build_regressors(nullptr, y, nullptr, {RegressorKind::autoregressive, 2, true});
    REQUIRE(r.rows() == 2);
    Matrix expect(2, 3);
    expect << 2, 1, 1, 3, 2, 1;
    CHECK(r.d == expect);
    CHECK(r.target(0) == 4.0);
    CHECK(std::isnan(r.target(1)));
  }
  SECTION("factor model, q = 5, p = 12") {
    const auto panel = standardize(random_panel(60, 8, 3));
    FactorMatrix f;
    f.values = Matrix::Random(60, 5);
    TargetSeries y;
    y.values = Vector::Random(70);
    y.horizon = 3;
    y.dates = month_range({1999, 1}, 70);
    const auto r = build_regressors(&panel, y, &f, {RegressorKind::factor_model, 12, true});
    CHECK(r.cols() == 18);
    CHECK(r.count(ColumnTag::factor) + r.count(ColumnTag::own_lag) + r.count(ColumnTag::intercept) == r.cols());
    const auto row = r.row_of({2002, 1});
    REQUIRE(row >= 0);
    CHECK(r.d(row, 5) == y.at({2001, 12}));
    CHECK(r.d(row, 0) == f.values(panel.row_of({2002, 1}), 0));
    CHECK(r.target(row) == y.at({2002, 4}));
    FactorMatrix bad;
    bad.values = Matrix::Zero(59, 5);
    CHECK_THROWS_AS(build_regressors(&panel, y, &bad, {}), ValidationError);
  }
}

TEST_CASE("vintage parsing") {
  const std::string text =
      "sasdate,INDPRO,CPIAUCSL,GAPPY,UNRATE\n"
      "Transform:,5,6,5,2\n"
      "1/1/2000,100,170,1,4.0\n"
      "2/1/2000,101,170.5,,4.1\n"
      "3/1/2000,102,171,1,4.3\n"
      "4/1/2000,101.5,171.2,1,4.2\n";
  std::istringstream in(text);
  const auto v = parse_vintage(in, {2000, 5}, {"INDPRO", "UNRATE"});
  CHECK(v.names == std::vector<std::string>{"INDPRO", "CPIAUCSL", "UNRATE"});
  CHECK(v.rejected == std::vector<std::string>{"GAPPY"});
  CHECK(v.dates.front() == YearMonth{2000, 1});
  CHECK(v.part_names() == std::vector<std::string>{"INDPRO", "UNRATE"});
  const auto p = transformed_panel(v, v.names);
  CHECK(p.rows() == 2);
  CHECK(p.dates.front() == YearMonth{2000, 3});
  CHECK_THAT(p.values(0, 2), WithinAbs(0.2, 1e-12));

  std::istringstream missing("date,A,B\nT,5,\n2000-01,1,2\n2000-02,1,2\n");
  CHECK_THROWS_WITH(parse_vintage(missing, {2000, 3}, {"A"}), ContainsSubstring("'B'"));
}

TEST_CASE("part-flag sidecar") {
  std::istringstream in("# extended Phillips curve\nINDPRO\n\n UNRATE \n");
  const auto flags = read_part_flags(in);
  CHECK(flags.size() == 2);
  CHECK(flags.count("UNRATE") == 1);
}

TEST_CASE("rolling windows") {
  const auto w = rolling_windows(300, 240, 240, 299, 1);
  REQUIRE(w.size() == 60);
  for (const auto& x : w) CHECK(x.length() == 240);
  CHECK(w.front().target == 240);  // month 241 in one-based counting
  CHECK(w.front().est_first == 0);
  CHECK_THROWS_WITH(rolling_windows(300, 240, 239, 299, 1), ContainsSubstring("insufficient history"));

  const auto dates = month_range({1980, 1}, 39 * 12);
  const auto paper = rolling_windows(dates, 240, {2000, 1}, {2018, 12}, 1);
  CHECK(paper.size() == 228);
  CHECK(dates[static_cast<std::size_t>(paper.front().est_first)] == YearMonth{1980, 1});
  CHECK(dates[static_cast<std::size_t>(paper.front().est_last)] == YearMonth{1999, 12});
}
