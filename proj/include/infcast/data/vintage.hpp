#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/types.hpp"
#include "infcast/data/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace infcast {

/// One snapshot of the monthly macro panel as published at `id`.
///
/// File layout (one CSV per vintage):
///   row 1: any label, then mnemonics
///   row 2: any label, then integer transform codes
///   rows 3..: `YYYY-MM` date, then raw values
/// A sidecar text file lists the part-flagged mnemonics, one per line.
///
/// Series with any missing value are moved to `rejected` on load.
struct Vintage {
  YearMonth id;
  std::vector<YearMonth> dates;
  std::vector<std::string> names;  // column order of the file, rejected series removed
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, int> transform_code;
  std::set<std::string> part_flag;
  std::vector<std::string> rejected;

  std::size_t length() const { return dates.size(); }
  bool has(const std::string& name) const { return series.count(name) > 0; }

  const std::vector<double>& values(const std::string& name) const {
    auto it = series.find(name);
    if (it == series.end()) throw ValidationError("series '" + name + "' not in vintage " + id.to_string());
    return it->second;
  }

  /// Names of part-flagged series still present, in file order.
  std::vector<std::string> part_names() const {
    std::vector<std::string> out;
    for (const auto& n : names) {
      if (part_flag.count(n)) out.push_back(n);
    }
    return out;
  }

  /// Copy holding only observations dated on or before `last`.
  Vintage truncated(YearMonth last) const {
    Vintage v = *this;
    const auto keep = static_cast<std::size_t>(
        std::upper_bound(dates.begin(), dates.end(), last) - dates.begin());
    v.dates.resize(keep);
    for (auto& [name, vals] : v.series) vals.resize(keep);
    return v;
  }

  std::ptrdiff_t index_of(YearMonth d) const {
    if (dates.empty()) return -1;
    const int off = d - dates.front();
    if (off < 0 || off >= static_cast<int>(dates.size())) return -1;
    return off;
  }

  void validate() const {
    if (dates.empty()) throw ValidationError("vintage " + id.to_string() + " has no observations");
    for (std::size_t t = 1; t < dates.size(); ++t) {
      if (dates[t] - dates[t - 1] != 1) {
        throw ValidationError("vintage " + id.to_string() + ": dates are not a contiguous monthly index at " +
                              dates[t].to_string());
      }
    }
    for (const auto& n : names) {
      auto it = transform_code.find(n);
      if (it == transform_code.end()) throw ValidationError("missing transform code for '" + n + "'");
      if (!is_valid_transform_code(it->second)) {
        throw ValidationError("invalid transform code " + std::to_string(it->second) + " for '" + n + "'");
      }
      if (series.at(n).size() != dates.size()) throw ValidationError("series '" + n + "' has wrong length");
    }
    if (part_names().empty()) throw ValidationError("vintage " + id.to_string() + ": no part-flagged series");
  }
};

inline std::set<std::string> read_part_flags(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace(t);
  }
  return out;
}

inline std::set<std::string> read_part_flags(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open part-flag file '" + path + "'");
  return read_part_flags(in);
}

inline Vintage parse_vintage(std::istream& in, YearMonth id, const std::set<std::string>& part_flags) {
  auto rows = csv::read_rows(in);
  if (rows.size() < 3) throw ValidationError("vintage " + id.to_string() + ": need header, code row and data");
  const auto& header = rows[0];
  const auto& codes = rows[1];
  Vintage v;
  v.id = id;
  v.part_flag = part_flags;
  const std::size_t ncol = header.size();
  std::vector<std::vector<double>> cols(ncol);
  for (std::size_t r = 2; r < rows.size(); ++r) {
    const auto& row = rows[r];
    v.dates.push_back(YearMonth::parse(row.at(0)));
    for (std::size_t c = 1; c < ncol; ++c) {
      cols[c].push_back(c < row.size() ? csv::parse_double(row[c]) : std::nan(""));
    }
  }
  for (std::size_t c = 1; c < ncol; ++c) {
    const std::string& name = header[c];
    if (name.empty()) throw ValidationError("vintage " + id.to_string() + ": empty mnemonic in column " + std::to_string(c));
    if (v.series.count(name) || std::find(v.rejected.begin(), v.rejected.end(), name) != v.rejected.end()) {
      throw ValidationError("duplicate mnemonic '" + name + "'");
    }
    const std::string code_text = c < codes.size() ? codes[c] : std::string();
    double code = csv::trim(code_text).empty() ? std::nan("") : csv::parse_double(code_text);
    if (std::isnan(code)) throw ValidationError("missing transform code for '" + name + "'");
    if (code != std::floor(code) || !is_valid_transform_code(static_cast<int>(code))) {
      throw ValidationError("invalid transform code '" + code_text + "' for '" + name + "'");
    }
    const bool complete = std::all_of(cols[c].begin(), cols[c].end(), [](double x) { return std::isfinite(x); });
    if (!complete) {
      v.rejected.push_back(name);
      continue;
    }
    v.names.push_back(name);
    v.transform_code[name] = static_cast<int>(code);
    v.series[name] = std::move(cols[c]);
  }
  v.validate();
  return v;
}

/// The vintage id is taken from the file stem when it parses as a date
/// (e.g. `2019-06.csv`), otherwise from the last data row.
inline Vintage read_vintage(const std::string& path, const std::set<std::string>& part_flags) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vintage '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string stem = std::filesystem::path(path).stem().string();
  YearMonth id{};
  bool have_id = false;
  try {
    id = YearMonth::parse(stem);
    have_id = true;
  } catch (const ValidationError&) {
  }
  Vintage v = parse_vintage(buf, id, part_flags);
  if (!have_id) v.id = v.dates.back();
  return v;
}

}  // namespace infcast
