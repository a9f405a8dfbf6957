#pragma once

#include "infcast/cli/config.hpp"
#include "infcast/core/csv.hpp"
#include "infcast/data/panel.hpp"
#include "infcast/data/target.hpp"
#include "infcast/dimred/compress.hpp"
#include "infcast/dma/dma.hpp"
#include "infcast/forecast/rolling.hpp"
#include "infcast/forecast/scoring.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace infcast {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitModelFailure = 3 };

namespace detail {

inline std::filesystem::path ensure_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ValidationError("cannot create directory '" + p.string() + "': " + ec.message());
  return p;
}

/// Writes through a temporary file so a crash never leaves a half-written
/// table behind.
template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    body(out);
    if (!out) throw ValidationError("write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline VintageArchive load_archive(const RunConfig& c) {
  return VintageArchive::load(c.vintage_dir, read_part_flags(c.part_flags));
}

inline std::vector<ForecastRecord> load_forecasts(const RunConfig& c) {
  const auto path = std::filesystem::path(c.output_dir) / "forecasts.csv";
  std::ifstream in(path);
  if (!in) throw ValidationError("no forecast panel at '" + path.string() + "'; run `forecast` first");
  return read_forecast_csv(in);
}

}  // namespace detail

/// Transformed and standardized panels plus the h-step targets of every
/// vintage: transform/<vintage>_panel.csv, _standardized.csv, _target_h<h>.csv.
inline int cmd_transform(const RunConfig& c, std::ostream& log = std::cerr) {
  const auto dir = detail::ensure_dir(std::filesystem::path(c.output_dir) / "transform");
  const auto flags = read_part_flags(c.part_flags);
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(c.vintage_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const Vintage v = read_vintage(f, flags);
    std::vector<std::string> names;
    for (const auto& n : v.names) {
      if (n != c.experiment.target_series) names.push_back(n);
    }
    const PanelMatrix p = transformed_panel(v, names);
    const std::string id = v.id.to_string();
    detail::write_file(dir / (id + "_panel.csv"), [&](std::ostream& o) { write_panel_csv(o, p); });
    detail::write_file(dir / (id + "_standardized.csv"), [&](std::ostream& o) { write_panel_csv(o, standardize(p)); });
    for (int h : c.experiment.horizons) {
      const auto y = build_target(v.values(c.experiment.target_series), v.dates, h);
      detail::write_file(dir / (id + "_target_h" + std::to_string(h) + ".csv"), [&](std::ostream& o) { write_target_csv(o, y); });
    }
    for (const auto& r : v.rejected) log << "vintage " << id << ": dropped incomplete series " << r << '\n';
  }
  log << "transformed " << files.size() << " vintage(s) into " << dir.string() << '\n';
  return kExitOk;
}

/// Factors of the final vintage through the end of the hold-out, one set per
/// (method, q), computed on the stacked lags standardized over that sample.
struct FactorRun {
  CompressionMethod method;
  Index q = 0;
  std::optional<FactorMatrix> factors;
  std::vector<YearMonth> dates;
  std::string error;
};

inline std::vector<FactorRun> compute_factors(const RunConfig& c) {
  const auto archive = detail::load_archive(c);
  const Vintage v = archive.final().truncated(c.experiment.holdout_end);
  std::vector<std::string> names;
  for (const auto& n : v.names) {
    if (n != c.experiment.target_series) names.push_back(n);
  }
  const PanelMatrix x = standardize(stack_lags(transformed_panel(v, names), c.experiment.factor_lags));
  std::vector<FactorRun> out;
  for (auto m : c.grid.methods) {
    for (auto q : c.grid.qs) {
      FactorRun r{m, q, std::nullopt, x.dates, {}};
      CompressionSpec spec{m, q, c.experiment.methods};
      spec.params.autoencoder.seed = derive_seed(c.experiment.seed, {hash_string(to_string(m)), static_cast<std::uint64_t>(q)});
      try {
        r.factors = compress(x.values, spec);
      } catch (const NumericalError& e) {
        r.error = e.what();
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline int cmd_compress(const RunConfig& c, std::ostream& log = std::cerr) {
  const auto dir = detail::ensure_dir(std::filesystem::path(c.output_dir) / "factors");
  int failures = 0;
  for (const auto& r : compute_factors(c)) {
    const std::string stem = std::string(to_string(r.method)) + "_q" + std::to_string(r.q);
    if (!r.factors) {
      ++failures;
      log << stem << ": " << r.error << '\n';
      continue;
    }
    detail::write_file(dir / (stem + ".csv"), [&](std::ostream& o) { write_factor_csv(o, *r.factors, r.dates); });
    detail::write_file(dir / (stem + "_diagnostics.csv"), [&](std::ostream& o) { write_factor_diagnostics_csv(o, *r.factors); });
    for (const auto& w : r.factors->warnings) log << stem << ": " << w << '\n';
  }
  return failures ? kExitModelFailure : kExitOk;
}

struct ForecastOptions {
  bool dry_run = false;
  std::optional<std::size_t> max_cells;
};

/// Rolling experiment with a journal under out/cache keyed by the settings
/// fingerprint; cells already in the journal are not re-estimated.
/// forecasts.csv always holds every finished cell, sorted.
inline int cmd_forecast(const RunConfig& c, const ForecastOptions& opt = {}, std::ostream& out = std::cout,
                        std::ostream& log = std::cerr) {
  const auto grid = build_grid(c.grid);
  const std::size_t total = count_cells(c.experiment, grid);
  if (opt.dry_run) {
    out << "models per horizon: " << grid.size() << '\n';
    out << "cells: " << total << '\n';
    return kExitOk;
  }
  const auto archive = detail::load_archive(c);
  const auto root = detail::ensure_dir(c.output_dir);
  const auto cache = detail::ensure_dir(root / "cache");
  const auto journal_path = cache / ("journal_" + c.fingerprint() + ".csv");

  std::vector<ForecastRecord> previous;
  if (std::filesystem::exists(journal_path)) {
    std::ifstream in(journal_path);
    previous = read_forecast_csv(in);
  }
  RunHooks hooks;
  for (const auto& r : previous) hooks.done.insert(cell_key(r.horizon, r.model, r.target));
  hooks.max_cells = opt.max_cells;

  const bool fresh = !std::filesystem::exists(journal_path);
  std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
  if (!journal) throw ValidationError("cannot open journal '" + journal_path.string() + "'");
  if (fresh) {
    write_forecast_header(journal);
    journal.flush();
  }
  hooks.on_record = [&](const ForecastRecord& r) {
    write_forecast_row(journal, r);
    journal.flush();
  };
  std::map<std::string, std::string> components;
  if (c.write_components) {
    hooks.on_density = [&](const PredictiveDensity& p, YearMonth target) {
      std::ostringstream s;
      write_density_components_csv(s, p, target);
      components[cell_key(p.horizon, p.model, target)] = s.str();
    };
  }
  if (!previous.empty()) log << "resuming: " << previous.size() << " of " << total << " cells already done\n";
  const auto fresh_records = rolling_forecast(archive, c.experiment, grid, hooks);

  std::vector<ForecastRecord> all = previous;
  all.insert(all.end(), fresh_records.begin(), fresh_records.end());
  std::sort(all.begin(), all.end(), record_less);
  detail::write_file(root / "forecasts.csv", [&](std::ostream& o) { write_forecast_csv(o, all); });
  if (c.write_components && !components.empty()) {
    const auto path = root / "components.csv";
    const bool exists = std::filesystem::exists(path);
    std::ofstream o(path, std::ios::app | std::ios::binary);
    if (!exists) csv::write_row(o, {"model", "horizon", "target", "component", "mean", "variance", "weight"});
    for (const auto& [k, rows] : components) o << rows;
  }

  int failed = 0;
  for (const auto& r : all) {
    if (!r.ok) {
      ++failed;
      log << "failed: " << r.model << " h=" << r.horizon << " " << r.target.to_string() << ": " << r.error << '\n';
    }
  }
  out << "cells finished: " << all.size() << " of " << total << " (" << fresh_records.size() << " this run, " << failed
      << " failed)\n";
  return failed ? kExitModelFailure : kExitOk;
}

/// scores/table.csv (relative LPL sums), scores/table_avg.csv (relative
/// LPL averages) and scores/models.csv (absolute scores per model).
inline int cmd_evaluate(const RunConfig& c, std::ostream& log = std::cerr) {
  const auto records = detail::load_forecasts(c);
  const auto table = evaluate(records, c.eval_start());
  if (table.entries.empty()) throw ValidationError("evaluate: no forecasts in the evaluation span");
  const auto rel = relative_scores(table, c.benchmark);
  const auto dir = detail::ensure_dir(std::filesystem::path(c.output_dir) / "scores");
  detail::write_file(dir / "table.csv", [&](std::ostream& o) { write_score_table_csv(o, rel, c.benchmark, false); });
  detail::write_file(dir / "table_avg.csv", [&](std::ostream& o) { write_score_table_csv(o, rel, c.benchmark, true); });
  detail::write_file(dir / "models.csv", [&](std::ostream& o) {
    csv::write_row(o, {"model", "horizon", "n", "lpl_sum", "lpl_avg", "rmse", "failures"});
    for (const auto& e : table.entries) {
      csv::write_row(o, {e.model, std::to_string(e.horizon), std::to_string(e.n()), csv::format_double(e.lpl_sum()),
                         csv::format_double(e.lpl_avg()), csv::format_double(e.rmse()), std::to_string(e.failures)});
    }
  });
  int failures = 0;
  for (const auto& e : table.entries) failures += e.failures;
  if (failures) log << failures << " forecast(s) in the evaluation span failed and are excluded\n";
  return kExitOk;
}

inline std::vector<DmaResult> run_all_dma(const RunConfig& c, const std::vector<ForecastRecord>& records) {
  const auto grid = build_grid(c.grid);
  std::vector<DmaResult> out;
  for (const auto& s : c.slices) {
    bool any = false;
    for (const auto& cell : grid) any = any || s.matches(cell);
    if (!any) continue;
    for (int h : c.experiment.horizons) out.push_back(run_dma(records, grid, s, h, c.delta));
  }
  if (out.empty()) throw ValidationError("combine: no slice selects any model of the grid");
  return out;
}

/// dma/table.csv (one row per slice), dma/pooled_forecasts.csv and one
/// weight history per slice and horizon under dma/weights/.
inline int cmd_combine(const RunConfig& c, std::ostream& log = std::cerr) {
  const auto records = detail::load_forecasts(c);
  const auto results = run_all_dma(c, records);
  const auto dir = detail::ensure_dir(std::filesystem::path(c.output_dir) / "dma");
  const auto wdir = detail::ensure_dir(dir / "weights");
  std::vector<ForecastRecord> pooled;
  int missing = 0;
  for (const auto& r : results) {
    detail::write_file(wdir / (r.slice + "_h" + std::to_string(r.horizon) + ".csv"),
                       [&](std::ostream& o) { write_weight_history_csv(o, r); });
    pooled.insert(pooled.end(), r.pooled.begin(), r.pooled.end());
    missing += r.missing_member_forecasts;
  }
  detail::write_file(dir / "pooled_forecasts.csv", [&](std::ostream& o) { write_forecast_csv(o, pooled); });
  detail::write_file(dir / "table.csv",
                     [&](std::ostream& o) { write_dma_table_csv(o, results, records, c.benchmark, c.eval_start()); });
  detail::write_file(dir / "table_avg.csv",
                     [&](std::ostream& o) { write_dma_table_csv(o, results, records, c.benchmark, c.eval_start(), true); });
  if (missing) log << missing << " missing member forecast(s) got zero likelihood mass\n";
  return kExitOk;
}

/// Plot-ready long tables under report/: factors.csv, cumulative_bf.csv,
/// weights.csv (attribute-summed DMA weights).
inline int cmd_report(const RunConfig& c, std::ostream& log = std::cerr) {
  const auto dir = detail::ensure_dir(std::filesystem::path(c.output_dir) / "report");
  int failures = 0;
  const auto factors = compute_factors(c);
  detail::write_file(dir / "factors.csv", [&](std::ostream& o) {
    csv::write_row(o, {"method", "q", "date", "factor", "value"});
    for (const auto& r : factors) {
      if (!r.factors) {
        ++failures;
        log << to_string(r.method) << "_q" << r.q << ": " << r.error << '\n';
        continue;
      }
      for (Index t = 0; t < r.factors->rows(); ++t) {
        for (Index j = 0; j < r.factors->cols(); ++j) {
          csv::write_row(o, {std::string(to_string(r.method)), std::to_string(r.q), r.dates[static_cast<std::size_t>(t)].to_string(),
                             std::to_string(j + 1), csv::format_double(r.factors->values(t, j))});
        }
      }
    }
  });
  const auto records = detail::load_forecasts(c);
  const auto table = evaluate(records, c.eval_start());
  detail::write_file(dir / "cumulative_bf.csv", [&](std::ostream& o) { write_cumulative_bf_csv(o, table, c.benchmark); });
  const auto results = run_all_dma(c, records);
  detail::write_file(dir / "weights.csv", [&](std::ostream& o) {
    bool header = true;
    for (const auto& r : results) {
      write_attribute_weights_csv(o, r, header);
      header = false;
    }
  });
  return failures ? kExitModelFailure : kExitOk;
}

}  // namespace infcast
