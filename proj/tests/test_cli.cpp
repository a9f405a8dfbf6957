#include "infcast/cli/commands.hpp"
#include "infcast/data/synthetic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace infcast;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Scratch directory with a small archive and a config writer.
struct Workspace {
  fs::path root;

  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("infcast_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root / "data" / "vintages");
    SyntheticConfig s;
    s.n_covariates = 8;
    s.n_months = 90;
    s.seed = 3;
    const auto d = make_synthetic(s);
    for (YearMonth id = d.truth.id - 3; id <= d.truth.id; id = id + 1) {
      std::ofstream f(root / "data" / "vintages" / (id.to_string() + ".csv"));
      write_vintage_csv(f, synthetic_vintage(d, s, id));
    }
    std::ofstream flags(root / "data" / "part_flags.txt");
    write_part_flags(flags, d.part_flags);
  }
  ~Workspace() { fs::remove_all(root); }

  fs::path config(const std::string& extra_grid = "methods = pca_linear\nq = 3\npriors = hs,ssvs\nparameters = const\n",
                  const std::string& extra = "") const {
    const auto p = root / "run.ini";
    std::ofstream o(p);
    o << "[data]\nvintage_dir = data/vintages\npart_flags = data/part_flags.txt\n"
      << "[design]\nwindow = 40\nown_lags = 2\nfactor_lags = 2\nholdout_start = 2006-09\nholdout_end = 2006-10\n"
      << "horizons = 1\ntraining_months = 1\n"
      << "[grid]\n" << extra_grid << "include_ar = true\ninclude_epc = false\n"
      << "[mcmc]\ndraws = 60\nburn = 20\n"
      << "[dimred]\nae_iterations = 20\n"
      << "[dma]\ndelta = 0.9\nslices = both_both_all,hs_const_q3\n"
      << "[run]\nseed = 5\noutput_dir = out\n" << extra;
    return p;
  }
};

EnvLookup no_env = [](const std::string&) { return std::optional<std::string>(); };

int run_cli(const std::string& args) {
  const std::string cmd = std::string(INFCAST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  Workspace ws("config");
  SECTION("paths resolve against the config directory") {
    const auto c = load_config(ws.config().string(), no_env);
    CHECK(c.vintage_dir == (ws.root / "data" / "vintages").string());
    CHECK(c.output_dir == (ws.root / "out").string());
    CHECK(c.experiment.window == 40);
    CHECK(c.experiment.model.mcmc.retained() == 40);
    CHECK(c.grid.methods.size() == 1);
    CHECK(c.slices.size() == 2);
    CHECK(c.eval_start() == YearMonth{2006, 10});
    CHECK(build_grid(c.grid).size() == 4);
  }
  SECTION("environment overrides") {
    const auto alt = ws.root / "elsewhere";
    fs::create_directories(alt);
    fs::copy(ws.root / "data", alt / "data", fs::copy_options::recursive);
    EnvLookup env = [&](const std::string& k) -> std::optional<std::string> {
      if (k == "INFCAST_DATA_DIR") return alt.string();
      if (k == "INFCAST_OUTPUT_DIR") return (ws.root / "other_out").string();
      return std::nullopt;
    };
    const auto c = load_config(ws.config().string(), env);
    CHECK(c.vintage_dir == (alt / "data" / "vintages").string());
    CHECK(c.output_dir == (ws.root / "other_out").string());
  }
  SECTION("validation errors") {
    CHECK_THROWS_AS(load_config(ws.config("methods = umap\n").string(), no_env), ValidationError);
    CHECK_THROWS_AS(load_config(ws.config("", "typo = 1\n").string(), no_env), ValidationError);
    CHECK_THROWS_AS(load_config(ws.config("priors = cauchy\n").string(), no_env), ValidationError);
    CHECK_THROWS_AS(load_config((ws.root / "missing.ini").string(), no_env), ValidationError);
    fs::remove_all(ws.root / "data" / "vintages");
    CHECK_THROWS_AS(load_config(ws.config().string(), no_env), ValidationError);
  }
  SECTION("default slices follow the q list") {
    std::ofstream o(ws.root / "std.ini");
    o << "[data]\nvintage_dir = data/vintages\npart_flags = data/part_flags.txt\n"
      << "[design]\nholdout_start = 2005-01\nholdout_end = 2007-06\n[run]\nseed = 1\n";
    o.close();
    const auto c = load_config((ws.root / "std.ini").string(), no_env);
    CHECK(c.slices.size() == 36);
    CHECK(build_grid(c.grid).size() == 102);
  }
}

TEST_CASE("commands") {
  Workspace ws("commands");
  const auto c = load_config(ws.config().string(), no_env);
  const fs::path out = c.output_dir;
  std::ostringstream sink, log;

  SECTION("dry run") {
    std::ostringstream o;
    CHECK(cmd_forecast(c, {true, std::nullopt}, o, log) == kExitOk);
    CHECK(o.str().find("cells: 8") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "forecasts.csv"));
  }
  SECTION("forecast, evaluate, combine, report") {
    REQUIRE(cmd_forecast(c, {}, sink, log) == kExitOk);
    const auto panel = slurp(out / "forecasts.csv");
    CHECK(std::count(panel.begin(), panel.end(), '\n') == 1 + 8);

    REQUIRE(cmd_evaluate(c, log) == kExitOk);
    std::ifstream t(out / "scores" / "table.csv");
    std::string line;
    std::getline(t, line);
    std::getline(t, line);
    CHECK(line.rfind("ar_const_hs,", 0) == 0);
    std::ifstream m(out / "scores" / "models.csv");
    std::getline(m, line);
    CHECK(line == "model,horizon,n,lpl_sum,lpl_avg,rmse,failures");

    REQUIRE(cmd_combine(c, log) == kExitOk);
    const auto table = slurp(out / "dma" / "table.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 2);
    std::ifstream w(out / "dma" / "weights" / "both_both_all_h1.csv");
    std::getline(w, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 4);

    REQUIRE(cmd_report(c, log) == kExitOk);
    CHECK(fs::exists(out / "report" / "factors.csv"));
    CHECK(fs::exists(out / "report" / "cumulative_bf.csv"));
    CHECK(fs::exists(out / "report" / "weights.csv"));

    fs::remove(out / "forecasts.csv");
    REQUIRE(cmd_forecast(c, {}, sink, log) == kExitOk);
    CHECK(slurp(out / "forecasts.csv") == panel);
  }
  SECTION("interrupted run resumes") {
    REQUIRE(cmd_forecast(c, {false, 3}, sink, log) == kExitOk);
    const auto partial = slurp(out / "forecasts.csv");
    CHECK(std::count(partial.begin(), partial.end(), '\n') == 1 + 3);
    std::ostringstream o;
    REQUIRE(cmd_forecast(c, {}, o, log) == kExitOk);
    CHECK(o.str().find("(5 this run") != std::string::npos);
    const auto resumed = slurp(out / "forecasts.csv");
    fs::remove_all(out);
    REQUIRE(cmd_forecast(c, {}, sink, log) == kExitOk);
    CHECK(slurp(out / "forecasts.csv") == resumed);
  }
  SECTION("transform and compress are reproducible") {
    const auto c2 = load_config(ws.config("methods = pca_linear,autoencoder\nq = 3\npriors = hs\nparameters = const\n").string(), no_env);
    REQUIRE(cmd_transform(c2, log) == kExitOk);
    REQUIRE(cmd_compress(c2, log) == kExitOk);
    int n_factor_files = 0;
    for (const auto& e : fs::directory_iterator(out / "factors")) {
      n_factor_files += e.path().filename().string().find("_diagnostics") == std::string::npos;
    }
    CHECK(n_factor_files == 2);
    const auto panel = slurp(out / "transform" / "2007-06_panel.csv");
    const auto ae = slurp(out / "factors" / "autoencoder_q3.csv");
    CHECK_FALSE(panel.empty());
    REQUIRE(cmd_transform(c2, log) == kExitOk);
    REQUIRE(cmd_compress(c2, log) == kExitOk);
    CHECK(slurp(out / "transform" / "2007-06_panel.csv") == panel);
    CHECK(slurp(out / "factors" / "autoencoder_q3.csv") == ae);
  }
  SECTION("failed cells give exit code 3 and keep the others") {
    const auto c3 = load_config(ws.config("methods = isomap\nq = 3\npriors = hs\nparameters = const\n",
                                          "").string(), no_env);
    auto broken = c3;
    broken.experiment.methods.isomap_k = 1;
    REQUIRE(cmd_forecast(broken, {}, sink, log) == kExitModelFailure);
    const auto panel = slurp(out / "forecasts.csv");
    CHECK(panel.find(",failed,") != std::string::npos);
    CHECK(panel.find("ar_const_hs,") != std::string::npos);
  }
  SECTION("evaluate before forecast") {
    CHECK_THROWS_AS(cmd_evaluate(c, log), ValidationError);
  }
}

TEST_CASE("executable exit codes") {
  Workspace ws("exe");
  const auto cfg = ws.config().string();
  CHECK(run_cli("forecast --dry-run -c " + cfg) == 0);
  CHECK(run_cli("compress -c " + ws.config("methods = umap\n").string()) == 2);
  CHECK(run_cli("frobnicate -c " + cfg) == 2);

  std::ifstream in(ws.root / "data" / "vintages" / "2007-06.csv");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto row2 = text.find('\n') + 1;
  const auto comma = text.find(',', row2);
  text.replace(comma + 1, text.find(',', comma + 1) - comma - 1, "");
  in.close();
  std::ofstream(ws.root / "data" / "vintages" / "2007-06.csv") << text;
  CHECK(run_cli("transform -c " + ws.config().string()) == 2);
}
