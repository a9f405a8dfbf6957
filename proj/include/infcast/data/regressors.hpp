#pragma once

#include "infcast/core/types.hpp"
#include "infcast/data/panel.hpp"
#include "infcast/data/target.hpp"
#include "infcast/dimred/factor_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace infcast {

enum class ColumnTag { factor, own_lag, covariate, intercept };

enum class RegressorKind {
  factor_model,    // d_t = (z_t', y_{t-1}, ..., y_{t-p}, 1)'
  autoregressive,  // d_t = (y_{t-1}, ..., y_{t-p}, 1)'
  extended_pc      // d_t = (s_t^{part}', y_{t-1}, ..., y_{t-p}, 1)', covariates uncompressed
};

struct RegressorConfig {
  RegressorKind kind = RegressorKind::factor_model;
  int p = 12;
  bool intercept = true;
};

/// Design rows d_t paired with y_{t+h}. `target(i)` is NaN when y_{t+h} is
/// not realized in the supplied series (forecast rows).
struct RegressorSet {
  Matrix d;
  std::vector<ColumnTag> tags;
  std::vector<std::string> names;
  std::vector<YearMonth> dates;
  Vector target;
  int horizon = 1;

  Index rows() const { return d.rows(); }
  Index cols() const { return d.cols(); }

  Index count(ColumnTag tag) const {
    return static_cast<Index>(std::count(tags.begin(), tags.end(), tag));
  }

  std::ptrdiff_t row_of(YearMonth t) const {
    if (dates.empty()) return -1;
    const int off = t - dates.front();
    if (off < 0 || off >= static_cast<int>(dates.size())) return -1;
    return off;
  }
};

/// `panel` supplies the date index (and, for extended_pc, the covariate
/// columns); `factors` must have one row per panel row for factor_model.
/// Rows run over dates t where every block is observed and y_{t-p} exists,
/// up to the last realized y.
inline RegressorSet build_regressors(const PanelMatrix* panel, const TargetSeries& y, const FactorMatrix* factors,
                                     const RegressorConfig& cfg) {
  if (cfg.p < 1) throw ValidationError("build_regressors: p must be >= 1");
  if (y.dates.size() != static_cast<std::size_t>(y.size()) || y.size() == 0) {
    throw ValidationError("build_regressors: target series lacks dates");
  }
  const bool needs_panel = cfg.kind != RegressorKind::autoregressive;
  if (needs_panel && panel == nullptr) throw ValidationError("build_regressors: panel required");
  if (cfg.kind == RegressorKind::factor_model) {
    if (factors == nullptr) throw ValidationError("build_regressors: factor matrix required");
    if (factors->rows() != panel->rows()) {
      throw ValidationError("build_regressors: factor matrix has " + std::to_string(factors->rows()) +
                            " rows, panel has " + std::to_string(panel->rows()));
    }
  }
  if (panel) {
    for (std::size_t t = 1; t < panel->dates.size(); ++t) {
      if (panel->dates[t] - panel->dates[t - 1] != 1) throw ValidationError("build_regressors: panel dates not monthly");
    }
  }

  YearMonth first = y.dates.front() + cfg.p;
  YearMonth last = y.dates.back();
  if (panel) {
    if (panel->dates.empty()) throw ValidationError("build_regressors: empty panel");
    first = std::max(first, panel->dates.front());
    last = std::min(last, panel->dates.back());
  }
  if (last < first) throw ValidationError("build_regressors: panel and target dates do not overlap");

  RegressorSet r;
  r.horizon = y.horizon;
  const Index n_fac = cfg.kind == RegressorKind::factor_model ? factors->cols() : 0;
  const Index n_cov = cfg.kind == RegressorKind::extended_pc ? panel->cols() : 0;
  for (Index j = 0; j < n_fac; ++j) {
    r.tags.push_back(ColumnTag::factor);
    r.names.push_back("f" + std::to_string(j + 1));
  }
  for (Index j = 0; j < n_cov; ++j) {
    r.tags.push_back(ColumnTag::covariate);
    r.names.push_back(panel->names[static_cast<std::size_t>(j)]);
  }
  for (int l = 1; l <= cfg.p; ++l) {
    r.tags.push_back(ColumnTag::own_lag);
    r.names.push_back("y_L" + std::to_string(l));
  }
  if (cfg.intercept) {
    r.tags.push_back(ColumnTag::intercept);
    r.names.push_back("const");
  }

  const int n_rows = last - first + 1;
  r.d.resize(n_rows, static_cast<Index>(r.tags.size()));
  r.target.resize(n_rows);
  for (int i = 0; i < n_rows; ++i) {
    const YearMonth t = first + i;
    r.dates.push_back(t);
    Index c = 0;
    if (panel) {
      const auto pr = panel->row_of(t);
      for (Index j = 0; j < n_fac; ++j) r.d(i, c++) = factors->values(pr, j);
      for (Index j = 0; j < n_cov; ++j) r.d(i, c++) = panel->values(pr, j);
    }
    for (int l = 1; l <= cfg.p; ++l) r.d(i, c++) = y.at(t - l);
    if (cfg.intercept) r.d(i, c++) = 1.0;
    r.target(i) = y.at(t + y.horizon);
  }
  if (!r.d.allFinite()) throw ValidationError("build_regressors: non-finite regressor entries");
  return r;
}

}  // namespace infcast
