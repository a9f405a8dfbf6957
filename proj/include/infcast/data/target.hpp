#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/types.hpp"

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace infcast {

/// h-step inflation target y_{t+h} = ln(CPI_{t+h}/CPI_t) - ln(CPI_t/CPI_{t-1}).
/// `values[i]` is realized at `dates[i]` (the date t+h).
struct TargetSeries {
  Vector values;
  int horizon = 1;
  std::vector<YearMonth> dates;

  Index size() const { return values.size(); }

  std::ptrdiff_t index_of(YearMonth d) const {
    if (dates.empty()) return -1;
    const int off = d - dates.front();
    if (off < 0 || off >= static_cast<int>(dates.size())) return -1;
    return off;
  }

  /// Value realized at `d`, NaN when outside the series.
  double at(YearMonth d) const {
    const auto i = index_of(d);
    return i < 0 ? std::nan("") : values(i);
  }
};

/// Result has cpi.size() - (h + 1) entries, for t = 1 .. n-1-h.
inline TargetSeries build_target(std::span<const double> cpi, int h) {
  if (h < 1) throw ValidationError("build_target: horizon must be >= 1");
  const auto n = static_cast<int>(cpi.size());
  if (n <= h + 1) throw ValidationError("build_target: CPI series too short for horizon " + std::to_string(h));
  for (double c : cpi) {
    if (!(c > 0.0)) throw ValidationError("build_target: non-positive CPI value");
  }
  TargetSeries y;
  y.horizon = h;
  y.values.resize(n - h - 1);
  for (int t = 1; t + h < n; ++t) {
    const double lc = std::log(cpi[static_cast<std::size_t>(t)]);
    y.values(t - 1) = (std::log(cpi[static_cast<std::size_t>(t + h)]) - lc) - (lc - std::log(cpi[static_cast<std::size_t>(t - 1)]));
  }
  return y;
}

/// Same, with the realization dates attached; `dates` indexes the CPI series.
inline TargetSeries build_target(std::span<const double> cpi, const std::vector<YearMonth>& dates, int h) {
  if (dates.size() != cpi.size()) throw ValidationError("build_target: dates and CPI differ in length");
  TargetSeries y = build_target(cpi, h);
  y.dates.assign(dates.begin() + h + 1, dates.end());
  return y;
}

inline void write_target_csv(std::ostream& out, const TargetSeries& y) {
  csv::write_row(out, {"date", "y_h" + std::to_string(y.horizon)});
  for (Index i = 0; i < y.size(); ++i) {
    csv::write_row(out, {y.dates[static_cast<std::size_t>(i)].to_string(), csv::format_double(y.values(i))});
  }
}

}  // namespace infcast
