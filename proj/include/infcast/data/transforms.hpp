#pragma once

#include "infcast/core/types.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace infcast {

/// Stationarity transformation codes of the FRED-MD convention:
///   1  x_t
///   2  Δx_t
///   4  log x_t
///   5  Δ log x_t
///   6  Δ² log x_t
///   7  Δ(x_t / x_{t-1} - 1)
enum class TransformCode : int { level = 1, diff = 2, log = 4, log_diff = 5, log_diff2 = 6, pct_change_diff = 7 };

constexpr bool is_valid_transform_code(int code) {
  return code == 1 || code == 2 || code == 4 || code == 5 || code == 6 || code == 7;
}

constexpr bool uses_log(int code) { return code >= 4; }

/// Leading observations consumed by the differencing implied by `code`.
constexpr int dropped_leading(int code) {
  switch (code) {
    case 1: return 0;
    case 2: return 1;
    case 4: return 0;
    case 5: return 1;
    case 6: return 2;
    case 7: return 2;
    default: return -1;
  }
}

inline std::vector<double> apply_transform(std::span<const double> series, int code) {
  if (!is_valid_transform_code(code)) {
    throw ValidationError("unknown transform code " + std::to_string(code));
  }
  const int drop = dropped_leading(code);
  if (series.size() < static_cast<std::size_t>(drop) + 1) {
    throw ValidationError("series of length " + std::to_string(series.size()) + " too short for transform code " +
                          std::to_string(code));
  }
  if (uses_log(code)) {
    for (double v : series) {
      if (!(v > 0.0)) throw ValidationError("non-positive value under log transform code " + std::to_string(code));
    }
  }

  const std::size_t n = series.size();
  std::vector<double> out;
  out.reserve(n - drop);
  switch (static_cast<TransformCode>(code)) {
    case TransformCode::level:
      out.assign(series.begin(), series.end());
      break;
    case TransformCode::diff:
      for (std::size_t t = 1; t < n; ++t) out.push_back(series[t] - series[t - 1]);
      break;
    case TransformCode::log:
      for (double v : series) out.push_back(std::log(v));
      break;
    case TransformCode::log_diff:
      for (std::size_t t = 1; t < n; ++t) out.push_back(std::log(series[t]) - std::log(series[t - 1]));
      break;
    case TransformCode::log_diff2:
      for (std::size_t t = 2; t < n; ++t) {
        out.push_back(std::log(series[t]) - 2.0 * std::log(series[t - 1]) + std::log(series[t - 2]));
      }
      break;
    case TransformCode::pct_change_diff:
      for (std::size_t t = 2; t < n; ++t) {
        out.push_back((series[t] / series[t - 1] - 1.0) - (series[t - 1] / series[t - 2] - 1.0));
      }
      break;
  }
  return out;
}

}  // namespace infcast
