#pragma once

#include "infcast/core/csv.hpp"
#include "infcast/core/random.hpp"
#include "infcast/core/types.hpp"
#include "infcast/dma/dma.hpp"
#include "infcast/forecast/grid.hpp"
#include "infcast/forecast/rolling.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace infcast {

/// Everything a run needs. Relative paths in the file are resolved against
/// the directory holding the config file; INFCAST_DATA_DIR replaces that
/// base for the data paths, INFCAST_OUTPUT_DIR replaces the output path.
struct RunConfig {
  std::string vintage_dir;
  std::string part_flags;
  std::string output_dir;
  ExperimentConfig experiment;
  GridConfig grid;
  int training_months = 24;
  double delta = 0.9;
  std::vector<PoolSlice> slices;
  std::string benchmark = "ar_const_hs";
  bool write_components = false;

  /// First target month that is scored (after the combination burn-in).
  YearMonth eval_start() const { return experiment.holdout_start + training_months; }

  /// Digest of the settings that determine forecast values, used to key
  /// the resumption journal.
  std::string fingerprint() const {
    std::ostringstream s;
    const auto& e = experiment;
    s << e.target_series << '|' << e.window << '|' << e.own_lags << '|' << e.factor_lags << '|'
      << e.holdout_start.to_string() << '|' << e.holdout_end.to_string() << '|' << e.seed << '|' << e.model.mcmc.draws
      << '|' << e.model.mcmc.burn << '|' << e.model.mcmc.thin << '|' << e.methods.poly_scale << '|'
      << e.methods.gauss_scale << '|' << e.methods.diffusion_steps << '|' << e.methods.diffusion_k << '|'
      << e.methods.lle_k << '|' << e.methods.isomap_k << '|' << e.methods.autoencoder.depth << '|'
      << e.methods.autoencoder.iterations << '|' << e.methods.autoencoder.learning_rate << '|' << vintage_dir << '|'
      << part_flags;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(s.str())));
    return buf;
  }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& item : csv::split_line(text, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: '" + key + "' expects an integer, got '" + text + "'");
  }
}

inline double parse_real(const std::string& key, const std::string& text) {
  try {
    const double v = csv::parse_double(text);
    if (std::isnan(v)) throw ValidationError(text);
    return v;
  } catch (const ValidationError&) {
    throw ValidationError("config: '" + key + "' expects a number, got '" + text + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ValidationError("config: '" + key + "' expects true or false, got '" + text + "'");
}

inline YearMonth parse_month(const std::string& key, const std::string& text) {
  try {
    return YearMonth::parse(text);
  } catch (const ValidationError&) {
    throw ValidationError("config: '" + key + "' expects YYYY-MM, got '" + text + "'");
  }
}

}  // namespace detail

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base, const EnvLookup& env = process_env) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  static const std::map<std::string, std::set<std::string>> known{
      {"data", {"vintage_dir", "part_flags", "target"}},
      {"design", {"window", "own_lags", "factor_lags", "holdout_start", "holdout_end", "horizons", "training_months"}},
      {"grid", {"methods", "q", "priors", "parameters", "include_ar", "include_epc"}},
      {"mcmc", {"draws", "burn", "thin"}},
      {"dimred",
       {"poly_scale", "gauss_scale", "diffusion_steps", "diffusion_k", "lle_k", "isomap_k", "ae_depth", "ae_iterations",
        "ae_learning_rate"}},
      {"dma", {"delta", "slices"}},
      {"run", {"seed", "threads", "output_dir", "benchmark", "write_components"}}};
  for (const auto& [section, child] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw ValidationError("config: unknown section [" + section + "]");
    for (const auto& [key, v] : child) {
      if (!it->second.count(key)) throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    auto v = tree.get_optional<std::string>(path);
    if (!v) return std::nullopt;
    return std::string(csv::trim(*v));
  };
  auto require = [&](const std::string& path) {
    auto v = get(path);
    if (!v || v->empty()) throw ValidationError("config: missing required key '" + path + "'");
    return *v;
  };

  RunConfig c;
  auto& e = c.experiment;
  const std::filesystem::path data_base = env("INFCAST_DATA_DIR").value_or(base.string());
  auto resolve = [](const std::filesystem::path& b, const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() ? path : b / path).lexically_normal().string();
  };
  c.vintage_dir = resolve(data_base, require("data.vintage_dir"));
  c.part_flags = resolve(data_base, require("data.part_flags"));
  if (auto v = get("data.target")) e.target_series = *v;

  if (auto v = get("design.window")) e.window = static_cast<int>(detail::parse_int("window", *v));
  if (auto v = get("design.own_lags")) e.own_lags = static_cast<int>(detail::parse_int("own_lags", *v));
  if (auto v = get("design.factor_lags")) e.factor_lags = static_cast<int>(detail::parse_int("factor_lags", *v));
  e.holdout_start = detail::parse_month("holdout_start", require("design.holdout_start"));
  e.holdout_end = detail::parse_month("holdout_end", require("design.holdout_end"));
  if (auto v = get("design.horizons")) {
    e.horizons.clear();
    for (const auto& h : detail::split_list(*v)) e.horizons.push_back(static_cast<int>(detail::parse_int("horizons", h)));
  }
  if (auto v = get("design.training_months")) c.training_months = static_cast<int>(detail::parse_int("training_months", *v));

  if (auto v = get("grid.methods"); v && *v != "all") {
    c.grid.methods.clear();
    for (const auto& m : detail::split_list(*v)) {
      const auto method = parse_method(m);
      if (!method) throw ValidationError("config: unknown compression method '" + m + "'");
      c.grid.methods.push_back(*method);
    }
  }
  if (auto v = get("grid.q")) {
    c.grid.qs.clear();
    for (const auto& q : detail::split_list(*v)) c.grid.qs.push_back(detail::parse_int("q", q));
  }
  if (auto v = get("grid.priors")) {
    c.grid.priors.clear();
    for (const auto& p : detail::split_list(*v)) {
      const auto prior = parse_prior(p);
      if (!prior) throw ValidationError("config: unknown prior '" + p + "'");
      c.grid.priors.push_back(*prior);
    }
  }
  if (auto v = get("grid.parameters")) {
    c.grid.tvp_modes.clear();
    for (const auto& p : detail::split_list(*v)) {
      if (p != "tvp" && p != "const") throw ValidationError("config: parameters must be tvp or const, got '" + p + "'");
      c.grid.tvp_modes.push_back(p == "tvp");
    }
  }
  if (auto v = get("grid.include_ar")) c.grid.include_ar = detail::parse_bool("include_ar", *v);
  if (auto v = get("grid.include_epc")) c.grid.include_epc = detail::parse_bool("include_epc", *v);

  if (auto v = get("mcmc.draws")) e.model.mcmc.draws = static_cast<int>(detail::parse_int("draws", *v));
  if (auto v = get("mcmc.burn")) e.model.mcmc.burn = static_cast<int>(detail::parse_int("burn", *v));
  if (auto v = get("mcmc.thin")) e.model.mcmc.thin = static_cast<int>(detail::parse_int("thin", *v));

  auto& m = e.methods;
  if (auto v = get("dimred.poly_scale")) m.poly_scale = detail::parse_real("poly_scale", *v);
  if (auto v = get("dimred.gauss_scale")) m.gauss_scale = detail::parse_real("gauss_scale", *v);
  if (auto v = get("dimred.diffusion_steps")) m.diffusion_steps = static_cast<int>(detail::parse_int("diffusion_steps", *v));
  if (auto v = get("dimred.diffusion_k")) m.diffusion_k = detail::parse_int("diffusion_k", *v);
  if (auto v = get("dimred.lle_k")) m.lle_k = detail::parse_int("lle_k", *v);
  if (auto v = get("dimred.isomap_k")) m.isomap_k = detail::parse_int("isomap_k", *v);
  if (auto v = get("dimred.ae_depth")) m.autoencoder.depth = static_cast<int>(detail::parse_int("ae_depth", *v));
  if (auto v = get("dimred.ae_iterations")) m.autoencoder.iterations = static_cast<int>(detail::parse_int("ae_iterations", *v));
  if (auto v = get("dimred.ae_learning_rate")) m.autoencoder.learning_rate = detail::parse_real("ae_learning_rate", *v);

  if (auto v = get("dma.delta")) c.delta = detail::parse_real("delta", *v);
  const std::string slices = get("dma.slices").value_or("standard");
  if (slices == "standard") {
    c.slices = standard_slices(c.grid.qs);
  } else {
    for (const auto& s : detail::split_list(slices)) {
      const auto slice = parse_slice(s);
      if (!slice) throw ValidationError("config: bad pool slice '" + s + "'");
      c.slices.push_back(*slice);
    }
  }

  const std::string seed = require("run.seed");
  const long seed_value = detail::parse_int("seed", seed);
  if (seed_value < 0) throw ValidationError("config: seed must be a non-negative integer");
  e.seed = static_cast<std::uint64_t>(seed_value);
  if (auto v = get("run.threads")) e.threads = static_cast<int>(detail::parse_int("threads", *v));
  c.output_dir = env("INFCAST_OUTPUT_DIR").value_or(resolve(base, get("run.output_dir").value_or("out")));
  if (auto v = get("run.benchmark")) c.benchmark = *v;
  if (auto v = get("run.write_components")) c.write_components = detail::parse_bool("write_components", *v);
  return c;
}

inline void validate(const RunConfig& c) {
  namespace fs = std::filesystem;
  c.experiment.validate();
  if (!fs::is_directory(c.vintage_dir)) throw ValidationError("config: vintage directory '" + c.vintage_dir + "' does not exist");
  if (!fs::is_regular_file(c.part_flags)) throw ValidationError("config: part-flag file '" + c.part_flags + "' does not exist");
  if (c.training_months < 0) throw ValidationError("config: training_months must be >= 0");
  if (c.eval_start() > c.experiment.holdout_end) {
    throw ValidationError("config: the training span covers the whole hold-out");
  }
  if (!(c.delta > 0.0 && c.delta <= 1.0)) throw ValidationError("config: delta must lie in (0, 1]");
  if (c.grid.methods.empty() && !c.grid.include_ar && !c.grid.include_epc) throw ValidationError("config: empty model grid");
  if (!c.grid.methods.empty() && (c.grid.qs.empty() || c.grid.tvp_modes.empty())) {
    throw ValidationError("config: factor models need q values and parameter modes");
  }
  if (c.grid.priors.empty()) throw ValidationError("config: no priors selected");
  for (auto q : c.grid.qs) {
    if (q < 1) throw ValidationError("config: q must be >= 1");
  }
  if (c.experiment.methods.autoencoder.iterations < 1 || c.experiment.methods.autoencoder.depth < 1) {
    throw ValidationError("config: autoencoder depth and iterations must be >= 1");
  }
  if (!parse_model_id(c.benchmark)) throw ValidationError("config: benchmark '" + c.benchmark + "' is not a model id");
}

inline RunConfig load_config(const std::string& path, const EnvLookup& env = process_env) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  RunConfig c = parse_config(in, std::filesystem::absolute(path).parent_path(), env);
  validate(c);
  return c;
}

}  // namespace infcast
