#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/types.hpp"
#include "infcast/forecast/density.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace infcast {

/// One row of the forecast panel. `ok == false` marks a recorded failure;
/// `point` and `lpl` are NaN then and `error` holds the reason.
struct ForecastRecord {
  YearMonth origin;
  YearMonth target;
  int horizon = 1;
  std::string model;
  double realized = std::nan("");
  double point = std::nan("");
  double lpl = std::nan("");
  bool ok = true;
  std::string error;
};

inline bool record_less(const ForecastRecord& a, const ForecastRecord& b) {
  if (a.horizon != b.horizon) return a.horizon < b.horizon;
  if (a.model != b.model) return a.model < b.model;
  return a.target < b.target;
}

/// Scores a density against its realization.
inline ForecastRecord score_forecast(const PredictiveDensity& p, YearMonth target, double realized) {
  ForecastRecord r;
  r.origin = p.origin;
  r.target = target;
  r.horizon = p.horizon;
  r.model = p.model;
  r.realized = realized;
  r.point = point_forecast(p);
  r.lpl = std::isfinite(realized) ? log_pred_likelihood(p, realized) : std::nan("");
  return r;
}

inline void write_forecast_header(std::ostream& out) {
  csv::write_row(out, {"origin", "target", "horizon", "model", "realized", "point", "lpl", "status", "message"});
}

inline void write_forecast_row(std::ostream& out, const ForecastRecord& r) {
  std::string msg = r.error;
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  csv::write_row(out, {r.origin.to_string(), r.target.to_string(), std::to_string(r.horizon), r.model,
                       csv::format_double(r.realized), csv::format_double(r.point), csv::format_double(r.lpl),
                       r.ok ? "ok" : "failed", msg});
}

inline void write_forecast_csv(std::ostream& out, std::vector<ForecastRecord> records) {
  std::sort(records.begin(), records.end(), record_less);
  write_forecast_header(out);
  for (const auto& r : records) write_forecast_row(out, r);
}

inline ForecastRecord parse_forecast_row(const std::vector<std::string>& row) {
  if (row.size() < 8) throw ValidationError("forecast panel: row has " + std::to_string(row.size()) + " fields");
  ForecastRecord r;
  r.origin = YearMonth::parse(row[0]);
  r.target = YearMonth::parse(row[1]);
  r.horizon = static_cast<int>(csv::parse_double(row[2]));
  r.model = row[3];
  r.realized = csv::parse_double(row[4]);
  r.point = csv::parse_double(row[5]);
  r.lpl = csv::parse_double(row[6]);
  if (row[7] != "ok" && row[7] != "failed") throw ValidationError("forecast panel: bad status '" + row[7] + "'");
  r.ok = row[7] == "ok";
  if (row.size() > 8) r.error = row[8];
  return r;
}

/// Reads a panel written by write_forecast_csv. Later duplicates of the same
/// (horizon, model, target) replace earlier ones.
inline std::vector<ForecastRecord> read_forecast_csv(std::istream& in) {
  auto rows = csv::read_rows(in);
  std::map<std::tuple<int, std::string, int>, ForecastRecord> uniq;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty() || rows[i][0] == "origin") continue;
    auto r = parse_forecast_row(rows[i]);
    uniq[{r.horizon, r.model, r.target.ordinal()}] = std::move(r);
  }
  std::vector<ForecastRecord> out;
  for (auto& [k, r] : uniq) out.push_back(std::move(r));
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

/// Per-period component dump: target, component, mean, variance, weight.
inline void write_density_components_csv(std::ostream& out, const PredictiveDensity& p, YearMonth target) {
  for (Index s = 0; s < p.size(); ++s) {
    csv::write_row(out, {p.model, std::to_string(p.horizon), target.to_string(), std::to_string(s),
                         csv::format_double(p.mean(s)), csv::format_double(p.var(s)), csv::format_double(p.weight(s))});
  }
}

/// Scores of one (model, horizon) over its evaluated months.
struct ModelScore {
  std::string model;
  int horizon = 1;
  std::vector<YearMonth> dates;
  std::vector<double> lpl;
  std::vector<double> sq_error;
  int failures = 0;

  Index n() const { return static_cast<Index>(dates.size()); }
  double lpl_sum() const {
    double s = 0.0;
    for (double v : lpl) s += v;
    return s;
  }
  double lpl_avg() const { return dates.empty() ? std::nan("") : lpl_sum() / static_cast<double>(n()); }
  double rmse() const {
    if (dates.empty()) return std::nan("");
    double s = 0.0;
    for (double v : sq_error) s += v;
    return std::sqrt(s / static_cast<double>(n()));
  }
};

struct ScoreTable {
  std::vector<ModelScore> entries;  // sorted by (horizon, model)

  const ModelScore* find(const std::string& model, int horizon) const {
    for (const auto& e : entries) {
      if (e.model == model && e.horizon == horizon) return &e;
    }
    return nullptr;
  }

  std::vector<int> horizons() const {
    std::set<int> hs;
    for (const auto& e : entries) hs.insert(e.horizon);
    return {hs.begin(), hs.end()};
  }

  std::vector<std::string> models() const {
    std::set<std::string> ms;
    for (const auto& e : entries) ms.insert(e.model);
    return {ms.begin(), ms.end()};
  }
};

/// Aggregates successful, realized forecasts with target >= `eval_start`.
/// Duplicate (model, horizon, target) entries are rejected.
inline ScoreTable evaluate(const std::vector<ForecastRecord>& records, std::optional<YearMonth> eval_start = {}) {
  std::map<std::pair<int, std::string>, ModelScore> acc;
  std::set<std::tuple<int, std::string, int>> seen;
  for (const auto& r : records) {
    if (eval_start && r.target < *eval_start) continue;
    if (!seen.insert({r.horizon, r.model, r.target.ordinal()}).second) {
      throw ValidationError("evaluate: duplicate forecast for " + r.model + " h=" + std::to_string(r.horizon) + " at " +
                            r.target.to_string());
    }
    auto& e = acc[{r.horizon, r.model}];
    e.model = r.model;
    e.horizon = r.horizon;
    if (!r.ok || !std::isfinite(r.realized) || !std::isfinite(r.point) || std::isnan(r.lpl)) {
      ++e.failures;
      continue;
    }
    e.dates.push_back(r.target);
    e.lpl.push_back(r.lpl);
    const double err = r.realized - r.point;
    e.sq_error.push_back(err * err);
  }
  ScoreTable t;
  for (auto& [key, e] : acc) {
    std::vector<std::size_t> idx(e.dates.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return e.dates[a] < e.dates[b]; });
    ModelScore s;
    s.model = e.model;
    s.horizon = e.horizon;
    s.failures = e.failures;
    for (auto i : idx) {
      s.dates.push_back(e.dates[i]);
      s.lpl.push_back(e.lpl[i]);
      s.sq_error.push_back(e.sq_error[i]);
    }
    t.entries.push_back(std::move(s));
  }
  return t;
}

/// Restricts every model of one horizon to the months where all of
/// `models` have a score.
inline std::vector<ModelScore> common_span(const ScoreTable& t, int horizon, const std::vector<std::string>& models) {
  std::vector<const ModelScore*> sel;
  for (const auto& m : models) {
    const auto* e = t.find(m, horizon);
    if (!e) throw ValidationError("scores: no entries for '" + m + "' at h=" + std::to_string(horizon));
    sel.push_back(e);
  }
  std::set<int> common;
  for (const auto& d : sel.front()->dates) common.insert(d.ordinal());
  for (const auto* e : sel) {
    std::set<int> mine;
    for (const auto& d : e->dates) mine.insert(d.ordinal());
    std::set<int> keep;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(), std::inserter(keep, keep.end()));
    common = std::move(keep);
  }
  std::vector<ModelScore> out;
  for (const auto* e : sel) {
    ModelScore s;
    s.model = e->model;
    s.horizon = e->horizon;
    s.failures = e->failures;
    for (std::size_t i = 0; i < e->dates.size(); ++i) {
      if (!common.count(e->dates[i].ordinal())) continue;
      s.dates.push_back(e->dates[i]);
      s.lpl.push_back(e->lpl[i]);
      s.sq_error.push_back(e->sq_error[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Model scores relative to a benchmark on a shared span.
struct RelativeScore {
  std::string model;
  int horizon = 1;
  Index n = 0;
  double lpl_sum = 0.0;      // model's own score on the span
  double rmse = 0.0;
  double rel_lpl_sum = 0.0;  // sum of LPL differences
  double rel_lpl_avg = 0.0;  // mean of LPL differences
  double rmse_ratio = 1.0;
};

inline RelativeScore relative_score(const ModelScore& model, const ModelScore& bench) {
  if (model.dates != bench.dates) throw ValidationError("relative_score: spans differ");
  if (model.dates.empty()) throw ValidationError("relative_score: empty span");
  RelativeScore r;
  r.model = model.model;
  r.horizon = model.horizon;
  r.n = model.n();
  r.lpl_sum = model.lpl_sum();
  r.rmse = model.rmse();
  double diff = 0.0;
  for (std::size_t i = 0; i < model.lpl.size(); ++i) diff += model.lpl[i] - bench.lpl[i];
  r.rel_lpl_sum = diff;
  r.rel_lpl_avg = diff / static_cast<double>(r.n);
  r.rmse_ratio = model.rmse() / bench.rmse();
  return r;
}

/// Relative scores of every model against `benchmark`, per horizon, on the
/// months where all models of that horizon have forecasts. Models listed in
/// `models` (all when empty) are compared; the benchmark row comes first.
inline std::vector<RelativeScore> relative_scores(const ScoreTable& t, const std::string& benchmark,
                                                  std::vector<std::string> models = {}) {
  if (models.empty()) models = t.models();
  if (std::find(models.begin(), models.end(), benchmark) == models.end()) models.insert(models.begin(), benchmark);
  std::vector<RelativeScore> out;
  for (int h : t.horizons()) {
    std::vector<std::string> present;
    for (const auto& m : models) {
      const auto* e = t.find(m, h);
      if (e && e->n() > 0) present.push_back(m);
    }
    if (std::find(present.begin(), present.end(), benchmark) == present.end()) {
      throw ValidationError("relative_scores: benchmark '" + benchmark + "' has no scores at h=" + std::to_string(h));
    }
    auto span = common_span(t, h, present);
    const auto& bench = *std::find_if(span.begin(), span.end(), [&](const ModelScore& s) { return s.model == benchmark; });
    out.push_back(relative_score(bench, bench));
    for (const auto& s : span) {
      if (s.model != benchmark) out.push_back(relative_score(s, bench));
    }
  }
  return out;
}

/// Table layout: one row per model, per horizon a relative-LPL and an
/// RMSE-ratio column. The benchmark row carries absolute values (LPL sum and
/// RMSE). `use_average` switches LPL columns to per-period averages.
inline void write_score_table_csv(std::ostream& out, const std::vector<RelativeScore>& rel, const std::string& benchmark,
                                  bool use_average = false) {
  std::set<int> hs;
  std::vector<std::string> models;
  for (const auto& r : rel) {
    hs.insert(r.horizon);
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  std::vector<std::string> head{"model"};
  for (int h : hs) {
    head.push_back("lpl_h" + std::to_string(h));
    head.push_back("rmse_h" + std::to_string(h));
  }
  head.push_back("n_months");
  csv::write_row(out, head);
  for (const auto& m : models) {
    std::vector<std::string> cells{m};
    Index n = 0;
    for (int h : hs) {
      auto it = std::find_if(rel.begin(), rel.end(), [&](const RelativeScore& r) { return r.model == m && r.horizon == h; });
      if (it == rel.end()) {
        cells.insert(cells.end(), {"", ""});
        continue;
      }
      n = std::max(n, it->n);
      if (m == benchmark) {
        cells.push_back(csv::format_double(use_average ? it->lpl_sum / static_cast<double>(it->n) : it->lpl_sum));
        cells.push_back(csv::format_double(it->rmse));
      } else {
        cells.push_back(csv::format_double(use_average ? it->rel_lpl_avg : it->rel_lpl_sum));
        cells.push_back(csv::format_double(it->rmse_ratio));
      }
    }
    cells.push_back(std::to_string(n));
    csv::write_row(out, cells);
  }
}

/// Long-format per-period LPL series with cumulative log Bayes factors
/// against the benchmark: horizon, model, date, lpl, cum_log_bf.
inline void write_cumulative_bf_csv(std::ostream& out, const ScoreTable& t, const std::string& benchmark) {
  csv::write_row(out, {"horizon", "model", "date", "lpl", "cum_log_bf"});
  for (int h : t.horizons()) {
    std::vector<std::string> present;
    for (const auto& m : t.models()) {
      const auto* e = t.find(m, h);
      if (e && e->n() > 0) present.push_back(m);
    }
    if (std::find(present.begin(), present.end(), benchmark) == present.end()) continue;
    auto span = common_span(t, h, present);
    const auto& bench = *std::find_if(span.begin(), span.end(), [&](const ModelScore& s) { return s.model == benchmark; });
    for (const auto& s : span) {
      double cum = 0.0;
      for (std::size_t i = 0; i < s.dates.size(); ++i) {
        cum += s.lpl[i] - bench.lpl[i];
        csv::write_row(out, {std::to_string(h), s.model, s.dates[i].to_string(), csv::format_double(s.lpl[i]),
                             csv::format_double(cum)});
      }
    }
  }
}

}  // namespace infcast
