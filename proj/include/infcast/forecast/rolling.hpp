#pragma once

#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/data/panel.hpp"
#include "infcast/data/regressors.hpp"
#include "infcast/data/target.hpp"
#include "infcast/data/vintage.hpp"
#include "infcast/dimred/compress.hpp"
#include "infcast/forecast/density.hpp"
#include "infcast/forecast/grid.hpp"
#include "infcast/forecast/scoring.hpp"
#include "infcast/tvp/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace infcast {

/// Vintages ordered by publication month.
class VintageArchive {
 public:
  VintageArchive() = default;
  explicit VintageArchive(std::vector<Vintage> v) : vintages_(std::move(v)) {
    if (vintages_.empty()) throw ValidationError("archive: no vintages");
    std::sort(vintages_.begin(), vintages_.end(), [](const Vintage& a, const Vintage& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < vintages_.size(); ++i) {
      if (vintages_[i].id == vintages_[i - 1].id) throw ValidationError("archive: duplicate vintage " + vintages_[i].id.to_string());
    }
  }

  /// Every `*.csv` file of `dir` is one vintage.
  static VintageArchive load(const std::string& dir, const std::set<std::string>& part_flags) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ValidationError("vintage directory '" + dir + "' does not exist");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no vintage CSV files in '" + dir + "'");
    std::vector<Vintage> v;
    for (const auto& f : files) v.push_back(read_vintage(f, part_flags));
    return VintageArchive(std::move(v));
  }

  /// Information set for a forecast made at `origin`: the latest vintage
  /// published by origin + 1 (monthly data appear with a one-month lag),
  /// or the earliest vintage when none is that old.
  const Vintage& for_origin(YearMonth origin) const {
    const Vintage* pick = &vintages_.front();
    for (const auto& v : vintages_) {
      if (v.id <= origin + 1) pick = &v;
    }
    return *pick;
  }

  /// Source of realized values.
  const Vintage& final() const { return vintages_.back(); }

  std::size_t size() const { return vintages_.size(); }

 private:
  std::vector<Vintage> vintages_;
};

struct ExperimentConfig {
  std::string target_series = "CPIAUCSL";
  int window = 120;       // estimation pairs per window
  int own_lags = 12;      // p in the regressions
  int factor_lags = 12;   // lags of the covariates stacked before compression
  YearMonth holdout_start;
  YearMonth holdout_end;
  std::vector<int> horizons{1, 3, 12};
  ModelSpec model;        // tvp, prior and seed are set per cell
  MethodParams methods;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const {
    if (window < 3) throw ValidationError("experiment: window must be >= 3");
    if (own_lags < 1 || factor_lags < 1) throw ValidationError("experiment: lag orders must be >= 1");
    if (holdout_end < holdout_start) throw ValidationError("experiment: hold-out ends before it starts");
    if (horizons.empty()) throw ValidationError("experiment: no horizons");
    for (int h : horizons) {
      if (h < 1) throw ValidationError("experiment: horizons must be positive");
    }
    if (threads < 1) throw ValidationError("experiment: threads must be >= 1");
    model.mcmc.validate();
  }
};

/// Everything one (target month, horizon) window needs, built only from the
/// vintage available at the origin and truncated at the origin.
struct WindowInputs {
  YearMonth target;
  YearMonth origin;
  int horizon = 1;
  YearMonth first_row;  // d-row of the first estimation pair
  double realized = std::nan("");
  TargetSeries y;
  PanelMatrix covariates;  // transformed, unstandardized, all rows up to origin
  std::vector<std::string> part_names;
};

inline WindowInputs window_inputs(const VintageArchive& archive, const ExperimentConfig& cfg, YearMonth target, int h) {
  WindowInputs w;
  w.target = target;
  w.horizon = h;
  w.origin = target - h;
  w.first_row = w.origin - cfg.window + 1 - h;
  const Vintage v = archive.for_origin(w.origin).truncated(w.origin);
  if (v.dates.empty() || v.dates.back() != w.origin) {
    throw ValidationError("vintage " + archive.for_origin(w.origin).id.to_string() + " does not reach origin " +
                          w.origin.to_string());
  }
  if (!v.has(cfg.target_series)) throw ValidationError("target series '" + cfg.target_series + "' missing in vintage " + v.id.to_string());
  w.y = build_target(v.values(cfg.target_series), v.dates, h);
  std::vector<std::string> names;
  for (const auto& n : v.names) {
    if (n != cfg.target_series) names.push_back(n);
  }
  if (names.empty()) throw ValidationError("vintage " + v.id.to_string() + " has no covariates");
  w.covariates = transformed_panel(v, names);
  for (const auto& n : v.part_names()) {
    if (n != cfg.target_series) w.part_names.push_back(n);
  }
  const Vintage& fin = archive.final();
  if (fin.has(cfg.target_series) && fin.index_of(target) >= 0) {
    w.realized = build_target(fin.values(cfg.target_series), fin.dates, h).at(target);
  }
  if (w.y.dates.empty() || w.first_row - cfg.own_lags < w.y.dates.front()) {
    throw ValidationError("window for " + target.to_string() + " h=" + std::to_string(h) +
                          ": not enough history for " + std::to_string(cfg.window) + " estimation pairs");
  }
  if (w.covariates.row_of(w.first_row - (cfg.factor_lags - 1)) < 0) {
    throw ValidationError("window for " + target.to_string() + " h=" + std::to_string(h) +
                          ": covariates start after " + (w.first_row - (cfg.factor_lags - 1)).to_string());
  }
  return w;
}

/// Stacked, window-standardized covariates for the factor models: rows
/// first_row .. origin.
inline PanelMatrix factor_panel(const WindowInputs& w, int factor_lags) {
  const PanelMatrix x = stack_lags(w.covariates, factor_lags);
  return standardize(x.slice_rows(x.row_of(w.first_row), x.row_of(w.origin)));
}

/// Part-flagged covariates, window-standardized, rows first_row .. origin.
inline PanelMatrix epc_panel(const WindowInputs& w) {
  if (w.part_names.empty()) throw ValidationError("extended PC: no part-flagged covariates");
  const PanelMatrix s = w.covariates.select_columns(w.part_names);
  return standardize(s.slice_rows(s.row_of(w.first_row), s.row_of(w.origin)));
}

/// Estimation sample and forecast row of one window.
struct CellData {
  Vector y;
  Matrix d;
  Vector d_row;
  std::vector<std::string> names;
};

inline CellData cell_data(const RegressorSet& reg, const WindowInputs& w, int window) {
  const auto first = reg.row_of(w.first_row);
  const auto last = reg.row_of(w.origin - w.horizon);
  const auto fc = reg.row_of(w.origin);
  if (first < 0 || last < 0 || fc < 0 || last - first + 1 != window) {
    throw ValidationError("window for " + w.target.to_string() + ": regressor rows do not cover the estimation span");
  }
  CellData c;
  c.y = reg.target.segment(first, window);
  c.d = reg.d.middleRows(first, window);
  c.d_row = reg.d.row(fc).transpose();
  c.names = reg.names;
  if (!c.y.allFinite()) throw ValidationError("window for " + w.target.to_string() + ": unrealized estimation target");
  return c;
}

inline std::uint64_t cell_seed(std::uint64_t master, YearMonth target, const std::string& model, int h) {
  return derive_seed(master, {static_cast<std::uint64_t>(target.ordinal()), hash_string(model), static_cast<std::uint64_t>(h)});
}

inline std::uint64_t factor_seed(std::uint64_t master, YearMonth target, CompressionMethod m, int h, Index q) {
  return derive_seed(master, {static_cast<std::uint64_t>(target.ordinal()), hash_string(to_string(m)),
                              static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(q)});
}

/// Fits one model on one window and returns its predictive density. The
/// predictive simulation uses a stream derived from `seed` separate from
/// the sampler's.
inline PredictiveDensity estimate_cell(const CellData& data, bool tvp, Prior prior, const ModelSpec& tmpl,
                                       std::uint64_t seed) {
  ModelSpec spec = tmpl;
  spec.tvp = tvp;
  spec.prior = prior;
  spec.seed = seed;
  spec.store_paths = false;
  const PosteriorDraws draws = run_mcmc(data.y, data.d, spec);
  Rng rng(mix64(seed ^ 0x5bd1e995ULL));
  return predictive_density(draws, data.d_row, rng);
}

inline RegressorConfig regressor_config(ModelFamily f, int p) {
  RegressorConfig rc;
  rc.p = p;
  rc.kind = f == ModelFamily::factor ? RegressorKind::factor_model
            : f == ModelFamily::autoregressive ? RegressorKind::autoregressive
                                               : RegressorKind::extended_pc;
  return rc;
}

/// Hooks for persistence. `done` lists cell keys (see cell_key) to skip;
/// `on_record` runs for every new record as soon as it exists, under a lock.
/// `max_cells` caps the number of cells estimated in this call.
struct RunHooks {
  std::set<std::string> done;
  std::optional<std::size_t> max_cells;
  std::function<void(const ForecastRecord&)> on_record;
  std::function<void(const PredictiveDensity&, YearMonth)> on_density;
};

inline std::string cell_key(int h, const std::string& model, YearMonth target) {
  return std::to_string(h) + "|" + model + "|" + target.to_string();
}

namespace detail {

/// Cells sharing one design: same window and, for factor models, the same
/// compression method and q.
struct Job {
  YearMonth target;
  int horizon = 1;
  std::vector<ModelCell> cells;
};

inline std::vector<Job> make_jobs(const ExperimentConfig& cfg, const std::vector<ModelCell>& grid, const RunHooks& hooks) {
  std::vector<Job> jobs;
  std::size_t budget = hooks.max_cells.value_or(static_cast<std::size_t>(-1));
  for (int h : cfg.horizons) {
    for (YearMonth t = cfg.holdout_start; t <= cfg.holdout_end; t = t + 1) {
      std::map<std::string, Job> groups;
      for (const auto& c : grid) {
        if (hooks.done.count(cell_key(h, c.id(), t))) continue;
        if (budget == 0) break;
        --budget;
        std::string key = c.family == ModelFamily::factor ? std::string(to_string(c.method)) + "_q" + std::to_string(c.q)
                          : c.family == ModelFamily::autoregressive ? "ar"
                                                                    : "epc";
        auto& j = groups[key];
        j.target = t;
        j.horizon = h;
        j.cells.push_back(c);
      }
      for (auto& [k, j] : groups) jobs.push_back(std::move(j));
    }
  }
  return jobs;
}

inline ForecastRecord failed_record(const WindowInputs* w, YearMonth target, int h, const ModelCell& c,
                                    const std::string& why) {
  ForecastRecord r;
  r.target = target;
  r.origin = target - h;
  r.horizon = h;
  r.model = c.id();
  r.realized = w ? w->realized : std::nan("");
  r.ok = false;
  r.error = why;
  return r;
}

inline std::vector<ForecastRecord> run_job(const VintageArchive& archive, const ExperimentConfig& cfg, const Job& job,
                                           const std::function<void(const PredictiveDensity&, YearMonth)>& on_density) {
  std::vector<ForecastRecord> out;
  std::optional<WindowInputs> w;
  std::optional<RegressorSet> reg;
  std::optional<CellData> data;
  try {
    w = window_inputs(archive, cfg, job.target, job.horizon);
    const ModelCell& c0 = job.cells.front();
    const RegressorConfig rc = regressor_config(c0.family, cfg.own_lags);
    if (c0.family == ModelFamily::factor) {
      const PanelMatrix x = factor_panel(*w, cfg.factor_lags);
      CompressionSpec cs{c0.method, c0.q, cfg.methods};
      cs.params.autoencoder.seed = factor_seed(cfg.seed, job.target, c0.method, job.horizon, c0.q);
      const FactorMatrix f = compress(x.values, cs);
      reg = build_regressors(&x, w->y, &f, rc);
    } else if (c0.family == ModelFamily::extended_pc) {
      const PanelMatrix s = epc_panel(*w);
      reg = build_regressors(&s, w->y, nullptr, rc);
    } else {
      reg = build_regressors(nullptr, w->y, nullptr, rc);
    }
    data = cell_data(*reg, *w, cfg.window);
  } catch (const std::exception& e) {
    for (const auto& c : job.cells) out.push_back(failed_record(w ? &*w : nullptr, job.target, job.horizon, c, e.what()));
    return out;
  }
  for (const auto& c : job.cells) {
    const std::string id = c.id();
    try {
      PredictiveDensity p = estimate_cell(*data, c.tvp, c.prior, cfg.model, cell_seed(cfg.seed, job.target, id, job.horizon));
      p.origin = w->origin;
      p.horizon = job.horizon;
      p.model = id;
      out.push_back(score_forecast(p, job.target, w->realized));
      if (on_density) on_density(p, job.target);
    } catch (const std::exception& e) {
      out.push_back(failed_record(&*w, job.target, job.horizon, c, e.what()));
    }
  }
  return out;
}

}  // namespace detail

/// Number of (target month, horizon, model) cells of an experiment.
inline std::size_t count_cells(const ExperimentConfig& cfg, const std::vector<ModelCell>& grid) {
  const auto months = static_cast<std::size_t>(cfg.holdout_end - cfg.holdout_start + 1);
  return months * cfg.horizons.size() * grid.size();
}

/// Rolling out-of-sample experiment over every hold-out month, horizon and
/// grid cell. Failures are returned as records with ok == false. The result
/// is sorted and does not depend on the thread count.
inline std::vector<ForecastRecord> rolling_forecast(const VintageArchive& archive, const ExperimentConfig& cfg,
                                                    const std::vector<ModelCell>& grid, RunHooks hooks = {}) {
  cfg.validate();
  if (grid.empty()) throw ValidationError("rolling_forecast: empty model grid");
  for (int h : cfg.horizons) window_inputs(archive, cfg, cfg.holdout_start, h);

  const auto jobs = detail::make_jobs(cfg, grid, hooks);
  std::vector<std::vector<ForecastRecord>> results(jobs.size());
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::function<void(const PredictiveDensity&, YearMonth)> on_density;
  if (hooks.on_density) {
    on_density = [&](const PredictiveDensity& p, YearMonth t) {
      std::lock_guard lock(mu);
      hooks.on_density(p, t);
    };
  }
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = detail::run_job(archive, cfg, jobs[i], on_density);
      if (hooks.on_record) {
        std::lock_guard lock(mu);
        for (const auto& r : results[i]) hooks.on_record(r);
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), std::max<std::size_t>(jobs.size(), 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<ForecastRecord> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

}  // namespace infcast
