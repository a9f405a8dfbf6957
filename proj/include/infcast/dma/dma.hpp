#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/types.hpp"
#include "infcast/forecast/density.hpp"
#include "infcast/forecast/grid.hpp"
#include "infcast/forecast/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace infcast {

/// Weights below this are lifted before forgetting so that a model that
/// failed once can re-enter the pool.
inline constexpr double kWeightFloor = 1e-20;

inline void check_simplex(const Vector& w, const char* what) {
  if (w.size() == 0) throw ValidationError(std::string(what) + ": empty weight vector");
  if (!w.allFinite() || (w.array() < 0.0).any()) throw ValidationError(std::string(what) + ": weights must be finite and non-negative");
  if (!(w.sum() > 0.0)) throw NumericalError(std::string(what) + ": all weights are zero");
}

/// rho_{t+h|t,j} = rho_{t|t,j}^delta / sum_l rho_{t|t,l}^delta, in log space.
inline Vector predict_weights(const Vector& w, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("dma: forgetting factor must lie in (0, 1]");
  check_simplex(w, "predict_weights");
  Vector lw(w.size());
  for (Index j = 0; j < w.size(); ++j) lw(j) = delta * std::log(std::max(w(j), kWeightFloor));
  const double mx = lw.maxCoeff();
  Vector out = (lw.array() - mx).unaryExpr([](double v) { return std::exp(v); }).matrix();
  return out / out.sum();
}

/// Posterior weights proportional to predicted x likelihood, from log
/// likelihoods. A -inf entry (missing forecast) gets weight zero.
inline Vector update_weights(const Vector& predicted, const Vector& log_lik) {
  check_simplex(predicted, "update_weights");
  if (log_lik.size() != predicted.size()) throw ValidationError("update_weights: length mismatch");
  const double ninf = -std::numeric_limits<double>::infinity();
  Vector lw(predicted.size());
  for (Index j = 0; j < lw.size(); ++j) {
    if (std::isnan(log_lik(j)) || log_lik(j) == std::numeric_limits<double>::infinity()) {
      throw ValidationError("update_weights: log likelihoods must be finite or -inf");
    }
    lw(j) = predicted(j) > 0.0 && log_lik(j) > ninf ? std::log(predicted(j)) + log_lik(j) : ninf;
  }
  const double mx = lw.maxCoeff();
  if (mx == ninf) throw NumericalError("update_weights: every model has zero likelihood");
  Vector out = (lw.array() - mx).unaryExpr([](double v) { return std::exp(v); }).matrix();
  return out / out.sum();
}

/// Weight mixture of member mixtures.
inline PredictiveDensity combine(const std::vector<PredictiveDensity>& members, const Vector& weights) {
  if (members.empty() || static_cast<Index>(members.size()) != weights.size()) {
    throw ValidationError("combine: need one weight per member density");
  }
  check_simplex(weights, "combine");
  Index total = 0;
  for (const auto& m : members) {
    m.validate();
    if (m.origin != members.front().origin || m.horizon != members.front().horizon) {
      throw ValidationError("combine: members differ in origin or horizon");
    }
    total += m.size();
  }
  PredictiveDensity out;
  out.origin = members.front().origin;
  out.horizon = members.front().horizon;
  out.model = "pool";
  out.mean.resize(total);
  out.var.resize(total);
  out.weights.resize(total);
  const double wsum = weights.sum();
  Index k = 0;
  for (std::size_t j = 0; j < members.size(); ++j) {
    const auto& m = members[j];
    for (Index s = 0; s < m.size(); ++s, ++k) {
      out.mean(k) = m.mean(s);
      out.var(k) = m.var(s);
      out.weights(k) = weights(static_cast<Index>(j)) / wsum * m.weight(s);
    }
  }
  out.weights /= out.weights.sum();
  return out;
}

/// log sum_j w_j exp(lpl_j), the LPL of the pooled mixture.
inline double pooled_lpl(const Vector& weights, const Vector& lpl) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < lpl.size(); ++j) {
    if (weights(j) > 0.0) mx = std::max(mx, lpl(j));
  }
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (Index j = 0; j < lpl.size(); ++j) {
    if (weights(j) > 0.0 && std::isfinite(lpl(j))) acc += weights(j) * std::exp(lpl(j) - mx);
  }
  return mx + std::log(acc);
}

/// Filter over the model grid; an empty optional means "both"/"all".
/// A q filter keeps factor models only.
struct PoolSlice {
  std::optional<Prior> prior;
  std::optional<bool> tvp;
  std::optional<Index> q;

  bool matches(const ModelCell& c) const {
    if (prior && c.prior != *prior) return false;
    if (tvp && c.tvp != *tvp) return false;
    if (q && (c.family != ModelFamily::factor || c.q != *q)) return false;
    return true;
  }

  std::string name() const {
    std::string s = prior ? std::string(to_string(*prior)) : "both";
    s += tvp ? (*tvp ? "_tvp" : "_const") : "_both";
    s += q ? "_q" + std::to_string(*q) : "_all";
    return s;
  }
};

inline std::optional<PoolSlice> parse_slice(const std::string& name) {
  const auto parts = csv::split_line(name, '_');
  if (parts.size() != 3) return std::nullopt;
  PoolSlice s;
  if (parts[0] != "both") {
    const auto p = parse_prior(parts[0]);
    if (!p) return std::nullopt;
    s.prior = *p;
  }
  if (parts[1] == "tvp") s.tvp = true;
  else if (parts[1] == "const") s.tvp = false;
  else if (parts[1] != "both") return std::nullopt;
  if (parts[2] != "all") {
    if (parts[2].size() < 2 || parts[2][0] != 'q') return std::nullopt;
    try {
      s.q = std::stoi(parts[2].substr(1));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return s;
}

/// Prior x parameter mode x q rows of the combination table.
inline std::vector<PoolSlice> standard_slices(const std::vector<Index>& qs) {
  std::vector<PoolSlice> out;
  const std::vector<std::optional<Prior>> priors{Prior::horseshoe, Prior::ssvs, std::nullopt};
  const std::vector<std::optional<bool>> modes{false, true, std::nullopt};
  std::vector<std::optional<Index>> qopts(qs.begin(), qs.end());
  qopts.push_back(std::nullopt);
  for (const auto& p : priors)
    for (const auto& m : modes)
      for (const auto& q : qopts) out.push_back({p, m, q});
  return out;
}

struct PoolState {
  std::vector<std::string> ids;
  Vector weights;
  double delta = 0.9;
  std::vector<std::pair<YearMonth, Vector>> history;  // predicted weights per target month

  void validate() const {
    if (ids.empty() || static_cast<Index>(ids.size()) != weights.size()) throw ValidationError("pool: ids and weights differ");
    if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("pool: forgetting factor must lie in (0, 1]");
    check_simplex(weights, "pool");
    if (std::abs(weights.sum() - 1.0) > 1e-12) throw ValidationError("pool: weights do not sum to one");
  }
};

struct DmaResult {
  std::string slice;
  int horizon = 1;
  PoolState state;                       // weights after the last update
  std::vector<ForecastRecord> pooled;    // one per hold-out month, model = "dma_<slice>"
  int missing_member_forecasts = 0;
};

/// Sequential predict/update over the hold-out months of one horizon. The
/// weights used for target tau come from the posterior at tau - h (the last
/// realization known at the origin), uniform before any update.
inline DmaResult run_dma(const std::vector<ForecastRecord>& panel, const std::vector<ModelCell>& grid,
                         const PoolSlice& slice, int horizon, double delta = 0.9) {
  DmaResult res;
  res.slice = slice.name();
  res.horizon = horizon;
  for (const auto& c : grid) {
    if (slice.matches(c)) res.state.ids.push_back(c.id());
  }
  if (res.state.ids.empty()) throw ValidationError("dma: slice '" + res.slice + "' selects no model");
  res.state.delta = delta;
  const Index j_len = static_cast<Index>(res.state.ids.size());
  std::map<std::string, Index> col;
  for (Index j = 0; j < j_len; ++j) col[res.state.ids[static_cast<std::size_t>(j)]] = j;

  struct Month {
    Vector lpl, point;
    YearMonth origin;
    double realized = std::nan("");
  };
  std::map<int, Month> months;
  const double ninf = -std::numeric_limits<double>::infinity();
  for (const auto& r : panel) {
    if (r.horizon != horizon) continue;
    auto& m = months[r.target.ordinal()];
    if (m.lpl.size() == 0) {
      m.lpl = Vector::Constant(j_len, ninf);
      m.point = Vector::Constant(j_len, std::nan(""));
      m.origin = r.origin;
    }
    if (std::isfinite(r.realized)) m.realized = r.realized;
    auto it = col.find(r.model);
    if (it == col.end() || !r.ok || !std::isfinite(r.lpl)) continue;
    m.lpl(it->second) = r.lpl;
    m.point(it->second) = r.point;
  }
  if (months.empty()) throw ValidationError("dma: no forecasts at h=" + std::to_string(horizon));

  const Vector uniform = Vector::Constant(j_len, 1.0 / static_cast<double>(j_len));
  std::map<int, Vector> posterior;
  for (auto& [ord, m] : months) {
    auto prev = posterior.upper_bound(ord - horizon);
    prev = prev == posterior.begin() ? posterior.end() : std::prev(prev);
    const Vector pred = prev == posterior.end() ? uniform : predict_weights(prev->second, delta);
    res.state.history.emplace_back(YearMonth::from_ordinal(ord), pred);

    ForecastRecord r;
    r.origin = m.origin;
    r.target = YearMonth::from_ordinal(ord);
    r.horizon = horizon;
    r.model = "dma_" + res.slice;
    r.realized = m.realized;
    double mass = 0.0, point = 0.0;
    for (Index j = 0; j < j_len; ++j) {
      if (m.lpl(j) == ninf) {
        ++res.missing_member_forecasts;
        continue;
      }
      mass += pred(j);
      point += pred(j) * m.point(j);
    }
    if (mass <= 0.0) {
      r.ok = false;
      r.error = "no member forecast";
      res.pooled.push_back(r);
      posterior[ord] = pred;
      continue;
    }
    Vector renorm = Vector::Zero(j_len);
    for (Index j = 0; j < j_len; ++j) {
      if (m.lpl(j) != ninf) renorm(j) = pred(j) / mass;
    }
    r.point = point / mass;
    r.lpl = pooled_lpl(renorm, m.lpl);
    res.pooled.push_back(r);
    posterior[ord] = update_weights(pred, m.lpl);
  }
  res.state.weights = posterior.rbegin()->second;
  return res;
}

/// Wide weight history: date, then one column per pooled model.
inline void write_weight_history_csv(std::ostream& out, const DmaResult& r) {
  std::vector<std::string> head{"date"};
  head.insert(head.end(), r.state.ids.begin(), r.state.ids.end());
  csv::write_row(out, head);
  for (const auto& [date, w] : r.state.history) {
    std::vector<std::string> cells{date.to_string()};
    for (Index j = 0; j < w.size(); ++j) cells.push_back(csv::format_double(w(j)));
    csv::write_row(out, cells);
  }
}

/// Weights summed by model attribute, long format for heatmaps:
/// horizon, date, attribute, level, weight.
inline void write_attribute_weights_csv(std::ostream& out, const DmaResult& r, bool header = true) {
  if (header) csv::write_row(out, {"slice", "horizon", "date", "attribute", "level", "weight"});
  std::vector<ModelCell> cells;
  for (const auto& id : r.state.ids) {
    const auto c = parse_model_id(id);
    if (!c) throw ValidationError("dma: unparsable model id '" + id + "'");
    cells.push_back(*c);
  }
  for (const auto& [date, w] : r.state.history) {
    std::map<std::pair<std::string, std::string>, double> sums;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto& c = cells[j];
      const double wj = w(static_cast<Index>(j));
      const std::string method = c.family == ModelFamily::factor ? std::string(to_string(c.method))
                                 : c.family == ModelFamily::autoregressive ? "ar"
                                                                           : "epc";
      sums[{"method", method}] += wj;
      sums[{"q", c.family == ModelFamily::factor ? std::to_string(c.q) : "none"}] += wj;
      sums[{"prior", std::string(to_string(c.prior))}] += wj;
      sums[{"parameters", c.tvp ? "tvp" : "const"}] += wj;
    }
    for (const auto& [key, v] : sums) {
      csv::write_row(out, {r.slice, std::to_string(r.horizon), date.to_string(), key.first, key.second, csv::format_double(v)});
    }
  }
}

/// Combination table: one row per slice, per horizon the pooled LPL relative
/// to the benchmark (sum over the common evaluation months) and the RMSE
/// ratio.
inline void write_dma_table_csv(std::ostream& out, const std::vector<DmaResult>& results,
                                const std::vector<ForecastRecord>& panel, const std::string& benchmark,
                                std::optional<YearMonth> eval_start, bool use_average = false) {
  std::vector<std::string> slices;
  std::set<int> hs;
  for (const auto& r : results) {
    if (std::find(slices.begin(), slices.end(), r.slice) == slices.end()) slices.push_back(r.slice);
    hs.insert(r.horizon);
  }
  std::vector<std::string> head{"slice"};
  for (int h : hs) {
    head.push_back("lpl_h" + std::to_string(h));
    head.push_back("rmse_h" + std::to_string(h));
  }
  csv::write_row(out, head);
  std::vector<ForecastRecord> bench;
  for (const auto& r : panel) {
    if (r.model == benchmark) bench.push_back(r);
  }
  for (const auto& s : slices) {
    std::vector<std::string> cells{s};
    for (int h : hs) {
      auto it = std::find_if(results.begin(), results.end(), [&](const DmaResult& r) { return r.slice == s && r.horizon == h; });
      if (it == results.end()) {
        cells.insert(cells.end(), {"", ""});
        continue;
      }
      std::vector<ForecastRecord> both = bench;
      both.insert(both.end(), it->pooled.begin(), it->pooled.end());
      const auto table = evaluate(both, eval_start);
      const auto* pooled = table.find("dma_" + s, h);
      const auto* b = table.find(benchmark, h);
      if (!pooled || !b || pooled->n() == 0 || b->n() == 0) {
        cells.insert(cells.end(), {"", ""});
        continue;
      }
      const auto span = common_span(table, h, {benchmark, "dma_" + s});
      const auto rel = relative_score(span[1], span[0]);
      cells.push_back(csv::format_double(use_average ? rel.rel_lpl_avg : rel.rel_lpl_sum));
      cells.push_back(csv::format_double(rel.rmse_ratio));
    }
    csv::write_row(out, cells);
  }
}

}  // namespace infcast
