#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace infcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when inputs violate a documented precondition (bad config, bad
/// file, out-of-range parameter). The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a valid result
/// (non-PD matrix, diverged training, disconnected graph).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calendar month. Ordered, with integer arithmetic in months.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  constexpr int ordinal() const { return year * 12 + (month - 1); }

  static constexpr YearMonth from_ordinal(int ord) {
    int y = ord / 12;
    int m = ord % 12;
    if (m < 0) {
      m += 12;
      --y;
    }
    return YearMonth{y, m + 1};
  }

  constexpr YearMonth operator+(int months) const { return from_ordinal(ordinal() + months); }
  constexpr YearMonth operator-(int months) const { return from_ordinal(ordinal() - months); }
  constexpr int operator-(const YearMonth& other) const { return ordinal() - other.ordinal(); }
  constexpr auto operator<=>(const YearMonth& other) const { return ordinal() <=> other.ordinal(); }
  constexpr bool operator==(const YearMonth& other) const = default;

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }

  /// Accepts `YYYY-MM`, `YYYY-MM-DD` and `M/D/YYYY` (the FRED-MD date style).
  static YearMonth parse(std::string_view text) {
    auto to_int = [&](std::string_view s) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError("bad date '" + std::string(text) + "'");
      }
      return v;
    };
    YearMonth ym;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto second = text.find('/', slash + 1);
      if (second == std::string_view::npos) throw ValidationError("bad date '" + std::string(text) + "'");
      ym.month = to_int(text.substr(0, slash));
      ym.year = to_int(text.substr(second + 1));
    } else {
      if (text.size() < 7 || text[4] != '-') throw ValidationError("bad date '" + std::string(text) + "'");
      ym.year = to_int(text.substr(0, 4));
      ym.month = to_int(text.substr(5, 2));
    }
    if (ym.month < 1 || ym.month > 12) throw ValidationError("bad month in '" + std::string(text) + "'");
    return ym;
  }
};

}  // namespace infcast
