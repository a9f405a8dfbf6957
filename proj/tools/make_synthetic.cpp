// Writes an artificial vintage archive in the monthly macro-panel layout:
// one CSV per vintage plus the part-flag sidecar.

#include "infcast/data/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Synthetic vintage generator"};
  infcast::SyntheticConfig cfg;
  std::string out_dir = "data";
  std::string start = "2000-01";
  int vintages = 1;
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--covariates", cfg.n_covariates, "number of covariates")->check(CLI::Range(2, 100000));
  app.add_option("--months", cfg.n_months, "months in the final vintage")->check(CLI::Range(24, 100000));
  app.add_option("--start", start, "first month, YYYY-MM");
  app.add_option("--factors", cfg.n_factors, "latent factors")->check(CLI::PositiveNumber);
  app.add_option("--break-month", cfg.break_month, "months from the start at which the inflation loading flips (0: none)");
  app.add_option("--vintages", vintages, "number of monthly vintages ending with the final one")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.start = infcast::YearMonth::parse(start);
    const auto data = infcast::make_synthetic(cfg);
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    fs::create_directories(root / "vintages");
    for (int k = vintages - 1; k >= 0; --k) {
      const infcast::YearMonth id = data.truth.id - k;
      const auto v = infcast::synthetic_vintage(data, cfg, id);
      std::ofstream f(root / "vintages" / (id.to_string() + ".csv"), std::ios::binary);
      infcast::write_vintage_csv(f, v);
    }
    std::ofstream flags(root / "part_flags.txt", std::ios::binary);
    infcast::write_part_flags(flags, data.part_flags);
    std::cout << "wrote " << vintages << " vintage(s) of " << cfg.n_covariates << " covariates to " << root.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
