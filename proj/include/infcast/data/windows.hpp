#pragma once

#include "infcast/core/types.hpp"

#include <string>
#include <vector>

namespace infcast {

/// One rolling estimation window. Indices are positions in a monthly date
/// index. `target` is the hold-out month being forecast, `origin` the last
/// month of the information set (target - h), and [est_first, est_last] the
/// realization dates of the estimation pairs (d_{t}, y_{t+h}).
struct RollingWindow {
  int target = 0;
  int origin = 0;
  int est_first = 0;
  int est_last = 0;

  int length() const { return est_last - est_first + 1; }
};

/// One window per hold-out month in [holdout_first, holdout_last], each with
/// exactly `window_len` estimation pairs ending at the origin.
/// `first_feasible` is the earliest index at which a pair can be realized.
inline std::vector<RollingWindow> rolling_windows(int n_dates, int window_len, int holdout_first, int holdout_last,
                                                  int horizon = 1, int first_feasible = 0) {
  if (window_len < 1) throw ValidationError("rolling_windows: window length must be >= 1");
  if (horizon < 1) throw ValidationError("rolling_windows: horizon must be >= 1");
  if (holdout_first > holdout_last || holdout_first < 0 || holdout_last >= n_dates) {
    throw ValidationError("rolling_windows: hold-out span outside the date index");
  }
  const int first_start = holdout_first - horizon - window_len + 1;
  if (first_start < first_feasible) {
    throw ValidationError("rolling_windows: insufficient history, need " + std::to_string(first_feasible - first_start) +
                          " more months before the hold-out for horizon " + std::to_string(horizon));
  }
  std::vector<RollingWindow> out;
  out.reserve(static_cast<std::size_t>(holdout_last - holdout_first + 1));
  for (int tau = holdout_first; tau <= holdout_last; ++tau) {
    RollingWindow w;
    w.target = tau;
    w.origin = tau - horizon;
    w.est_last = w.origin;
    w.est_first = w.origin - window_len + 1;
    out.push_back(w);
  }
  return out;
}

/// Date-based overload: hold-out bounds given as months of `dates`.
inline std::vector<RollingWindow> rolling_windows(const std::vector<YearMonth>& dates, int window_len,
                                                  YearMonth holdout_start, YearMonth holdout_end, int horizon = 1,
                                                  int first_feasible = 0) {
  if (dates.empty()) throw ValidationError("rolling_windows: empty date index");
  return rolling_windows(static_cast<int>(dates.size()), window_len, holdout_start - dates.front(),
                         holdout_end - dates.front(), horizon, first_feasible);
}

}  // namespace infcast
