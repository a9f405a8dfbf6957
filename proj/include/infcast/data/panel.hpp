#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/linalg.hpp"
#include "infcast/core/types.hpp"
#include "infcast/data/transforms.hpp"
#include "infcast/data/vintage.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

namespace infcast {

/// T x K covariate matrix with its monthly date index and column names.
/// `location`/`scale` hold the moments removed by standardize() (zero/one
/// otherwise).
struct PanelMatrix {
  Matrix values;
  std::vector<YearMonth> dates;
  std::vector<std::string> names;
  Vector location;
  Vector scale;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  std::ptrdiff_t row_of(YearMonth d) const {
    if (dates.empty()) return -1;
    const int off = d - dates.front();
    if (off < 0 || off >= static_cast<int>(dates.size())) return -1;
    return off;
  }

  /// Rows [first, last] inclusive.
  PanelMatrix slice_rows(Index first, Index last) const {
    if (first < 0 || last >= rows() || first > last) throw ValidationError("PanelMatrix::slice_rows out of range");
    PanelMatrix p;
    p.values = values.middleRows(first, last - first + 1);
    p.dates.assign(dates.begin() + first, dates.begin() + last + 1);
    p.names = names;
    p.location = Vector::Zero(cols());
    p.scale = Vector::Ones(cols());
    return p;
  }

  PanelMatrix select_columns(const std::vector<std::string>& wanted) const {
    PanelMatrix p;
    p.dates = dates;
    p.values.resize(rows(), static_cast<Index>(wanted.size()));
    for (std::size_t j = 0; j < wanted.size(); ++j) {
      auto it = std::find(names.begin(), names.end(), wanted[j]);
      if (it == names.end()) throw ValidationError("column '" + wanted[j] + "' not in panel");
      p.values.col(static_cast<Index>(j)) = values.col(it - names.begin());
    }
    p.names = wanted;
    p.location = Vector::Zero(p.cols());
    p.scale = Vector::Ones(p.cols());
    return p;
  }
};

/// Transforms the named series of a vintage and aligns them on one index by
/// dropping the leading rows consumed by the deepest differencing.
inline PanelMatrix transformed_panel(const Vintage& v, const std::vector<std::string>& names) {
  int drop = 0;
  for (const auto& n : names) {
    auto it = v.transform_code.find(n);
    if (it == v.transform_code.end()) throw ValidationError("missing transform code for '" + n + "'");
    drop = std::max(drop, dropped_leading(it->second));
  }
  const auto n_obs = static_cast<Index>(v.length());
  if (n_obs <= drop) throw ValidationError("vintage " + v.id.to_string() + " too short to transform");
  PanelMatrix p;
  p.values.resize(n_obs - drop, static_cast<Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const int code = v.transform_code.at(names[j]);
    std::vector<double> tr;
    try {
      tr = apply_transform(v.values(names[j]), code);
    } catch (const ValidationError& e) {
      throw ValidationError("series '" + names[j] + "': " + e.what());
    }
    const Index skip = drop - dropped_leading(code);
    for (Index t = 0; t < p.values.rows(); ++t) p.values(t, static_cast<Index>(j)) = tr[static_cast<std::size_t>(t + skip)];
  }
  p.dates.assign(v.dates.begin() + drop, v.dates.end());
  p.names = names;
  p.location = Vector::Zero(p.cols());
  p.scale = Vector::Ones(p.cols());
  return p;
}

/// Column-wise (x - mean) / sd with the n-1 variance divisor. Rejects
/// constant columns, naming the offending mnemonic.
inline PanelMatrix standardize(const PanelMatrix& panel) {
  if (!panel.values.allFinite()) throw ValidationError("standardize: panel has non-finite entries");
  if (panel.rows() < 2) throw ValidationError("standardize: need at least two rows");
  PanelMatrix out = panel;
  out.location.resize(panel.cols());
  out.scale.resize(panel.cols());
  for (Index j = 0; j < panel.cols(); ++j) {
    const double m = panel.values.col(j).mean();
    const double var = sample_variance(panel.values.col(j));
    const double sd = std::sqrt(var);
    if (!(sd > 0.0) || sd <= 1e-14 * std::max(1.0, std::abs(m))) {
      const std::string name = j < static_cast<Index>(panel.names.size()) ? panel.names[j] : std::to_string(j);
      throw ValidationError("standardize: column '" + name + "' is constant");
    }
    out.values.col(j) = (panel.values.col(j).array() - m) / sd;
    out.location(j) = m;
    out.scale(j) = sd;
  }
  return out;
}

/// x_t = (s_t', s_{t-1}', ..., s_{t-p+1}')'. The first p-1 rows are dropped.
/// Column names get a `_L<lag>` suffix for lags >= 1.
inline PanelMatrix stack_lags(const PanelMatrix& s, int p) {
  if (p < 1) throw ValidationError("stack_lags: p must be >= 1");
  if (s.rows() < p) throw ValidationError("stack_lags: fewer rows than lags");
  const Index k0 = s.cols();
  PanelMatrix x;
  const Index t_out = s.rows() - (p - 1);
  x.values.resize(t_out, k0 * p);
  for (int lag = 0; lag < p; ++lag) {
    x.values.middleCols(lag * k0, k0) = s.values.middleRows(p - 1 - lag, t_out);
    for (const auto& n : s.names) x.names.push_back(lag == 0 ? n : n + "_L" + std::to_string(lag));
  }
  x.dates.assign(s.dates.begin() + (p - 1), s.dates.end());
  x.location = Vector::Zero(x.cols());
  x.scale = Vector::Ones(x.cols());
  return x;
}

inline void write_panel_csv(std::ostream& out, const PanelMatrix& p) {
  std::vector<std::string> cells{"date"};
  cells.insert(cells.end(), p.names.begin(), p.names.end());
  csv::write_row(out, cells);
  for (Index t = 0; t < p.rows(); ++t) {
    cells.assign(1, p.dates[static_cast<std::size_t>(t)].to_string());
    for (Index j = 0; j < p.cols(); ++j) cells.push_back(csv::format_double(p.values(t, j)));
    csv::write_row(out, cells);
  }
}

}  // namespace infcast
