#pragma once

#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/data/vintage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace infcast {

/// Factor-driven artificial macro panel in the layout of a monthly vintage.
/// Covariates load on a few AR(1) factors and are integrated according to
/// their transform code, so the transformed panel is stationary. Inflation
/// loads on the lagged factors; `break_month` (months from the start, 0 for
/// none) flips the sign of that loading.
struct SyntheticConfig {
  int n_covariates = 20;
  int n_months = 160;
  YearMonth start{2000, 1};
  int n_factors = 3;
  double factor_persistence = 0.7;
  double inflation_loading = 0.002;
  double inflation_noise = 0.001;
  int break_month = 0;
  double part_share = 0.4;  // share of covariates flagged for the extended Phillips curve
  int revised_months = 3;   // trailing months revised between vintages
  double revision_noise = 0.05;
  std::uint64_t seed = 1;
  std::string target_name = "CPIAUCSL";
};

struct SyntheticData {
  Vintage truth;                    // final vintage, all months
  std::set<std::string> part_flags;
};

inline SyntheticData make_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_covariates < 2 || cfg.n_months < 24 || cfg.n_factors < 1) {
    throw ValidationError("synthetic: need >= 2 covariates, >= 24 months and >= 1 factor");
  }
  Rng rng(cfg.seed);
  const int n = cfg.n_months;
  const int r = cfg.n_factors;
  Matrix f = Matrix::Zero(n, r);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < r; ++j) {
      const double prev = t > 0 ? f(t - 1, j) : 0.0;
      f(t, j) = cfg.factor_persistence * prev + rng.normal();
    }
  }
  Matrix lambda(cfg.n_covariates, r);
  for (Index i = 0; i < lambda.size(); ++i) lambda(i) = rng.normal();
  const Vector b = rng.normal_vector(r);

  SyntheticData out;
  Vintage& v = out.truth;
  v.id = cfg.start + n;
  for (int t = 0; t < n; ++t) v.dates.push_back(cfg.start + t);

  static constexpr int kCodes[] = {1, 2, 5, 5, 2, 6};
  for (int i = 0; i < cfg.n_covariates; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "X%02d", i + 1);
    const std::string name = buf;
    const int code = kCodes[i % 6];
    std::vector<double> x(static_cast<std::size_t>(n));
    double level = 0.0, growth = 0.0;
    for (int t = 0; t < n; ++t) {
      const double s = lambda.row(i).dot(f.row(t)) + 0.5 * rng.normal();
      double val = 0.0;
      switch (code) {
        case 1: val = s; break;
        case 2: level += s; val = level; break;
        case 5: level += 0.01 * s; val = 100.0 * std::exp(level); break;
        case 6: growth = 0.002 + 0.005 * s; level += growth; val = 100.0 * std::exp(level); break;
      }
      x[static_cast<std::size_t>(t)] = val;
    }
    v.names.push_back(name);
    v.series[name] = std::move(x);
    v.transform_code[name] = code;
    if (i < std::max(1, static_cast<int>(std::lround(cfg.part_share * cfg.n_covariates)))) out.part_flags.insert(name);
  }

  std::vector<double> cpi(static_cast<std::size_t>(n));
  double lc = std::log(100.0), pi_prev = 0.002;
  for (int t = 0; t < n; ++t) {
    const double sign = cfg.break_month > 0 && t >= cfg.break_month ? -1.0 : 1.0;
    const double load = t > 0 ? sign * cfg.inflation_loading * b.dot(f.row(t - 1)) : 0.0;
    const double pi = 0.002 + 0.3 * (pi_prev - 0.002) + load + cfg.inflation_noise * rng.normal();
    lc += pi;
    pi_prev = pi;
    cpi[static_cast<std::size_t>(t)] = std::exp(lc);
  }
  v.names.push_back(cfg.target_name);
  v.series[cfg.target_name] = std::move(cpi);
  v.transform_code[cfg.target_name] = 6;
  v.part_flag = out.part_flags;
  v.validate();
  return out;
}

/// Vintage published at `id`: observations through id - 1, with the last
/// `revised_months` perturbed by a revision factor specific to the vintage.
inline Vintage synthetic_vintage(const SyntheticData& data, const SyntheticConfig& cfg, YearMonth id) {
  Vintage v = data.truth.truncated(id - 1);
  v.id = id;
  if (v.dates.empty()) throw ValidationError("synthetic: vintage " + id.to_string() + " precedes the sample");
  if (id > data.truth.dates.back()) return v;
  Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(id.ordinal())}));
  const auto len = v.dates.size();
  const std::size_t from = len > static_cast<std::size_t>(cfg.revised_months) ? len - static_cast<std::size_t>(cfg.revised_months) : 0;
  for (auto& name : v.names) {
    auto& x = v.series[name];
    for (std::size_t t = from; t < len; ++t) {
      const double noise = cfg.revision_noise * rng.normal();
      x[t] = v.transform_code[name] >= 4 ? x[t] * std::exp(0.001 * noise) : x[t] + noise;
    }
  }
  return v;
}

/// FRED-MD style file: mnemonic header, transform-code row, M/D/YYYY dates.
inline void write_vintage_csv(std::ostream& out, const Vintage& v) {
  out << "sasdate";
  for (const auto& n : v.names) out << ',' << n;
  out << "\nTransform:";
  for (const auto& n : v.names) out << ',' << v.transform_code.at(n);
  out << '\n';
  for (std::size_t t = 0; t < v.dates.size(); ++t) {
    out << v.dates[t].month << "/1/" << v.dates[t].year;
    for (const auto& n : v.names) out << ',' << csv::format_double(v.series.at(n)[t]);
    out << '\n';
  }
}

inline void write_part_flags(std::ostream& out, const std::set<std::string>& flags) {
  for (const auto& f : flags) out << f << '\n';
}

}  // namespace infcast
