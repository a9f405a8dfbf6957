// Command-line driver: transform, compress, forecast, evaluate, combine, report.

#include "infcast/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Real-time inflation forecasting with compressed macro panels"};
  app.require_subcommand(1);
  std::string config_path;
  infcast::ForecastOptions fopt;
  std::size_t max_cells = 0;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "run configuration (INI)")->required()->check(CLI::ExistingFile);
    return sub;
  };
  add("transform", "transformed and standardized panels of every vintage");
  add("compress", "factor matrices for every configured method and q");
  auto* forecast = add("forecast", "rolling out-of-sample forecasts (resumable)");
  forecast->add_flag("--dry-run", fopt.dry_run, "print the number of grid cells and exit");
  forecast->add_option("--max-cells", max_cells, "stop after estimating this many cells")->check(CLI::PositiveNumber);
  add("evaluate", "LPL and RMSE tables against the benchmark");
  add("combine", "dynamic model averaging over the configured pool slices");
  add("report", "long-format CSVs for plotting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : infcast::kExitValidation;
  }
  if (max_cells > 0) fopt.max_cells = max_cells;

  try {
    const auto cfg = infcast::load_config(config_path);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "transform") return infcast::cmd_transform(cfg);
    if (cmd == "compress") return infcast::cmd_compress(cfg);
    if (cmd == "forecast") return infcast::cmd_forecast(cfg, fopt);
    if (cmd == "evaluate") return infcast::cmd_evaluate(cfg);
    if (cmd == "combine") return infcast::cmd_combine(cfg);
    if (cmd == "report") return infcast::cmd_report(cfg);
  } catch (const infcast::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return infcast::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "model failure: " << e.what() << '\n';
    return infcast::kExitModelFailure;
  }
  return infcast::kExitValidation;
}
