#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conelab/config.hpp"
#include "conelab/kernels.hpp"
#include "conelab/fields.hpp"
#include "conelab/runner.hpp"

using namespace conelab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing") {
  const std::string text = R"(# comment
[chart]
n = 3
rho = 0.05

[grid]
points_per_axis = 16

[scheme]
nu = 0.02
burgers = false
mode = whole_interval

[sweep]
nus = 1e-1, 1e-2, 1e-3
rhos = 0.05,0.02
)";
  const RunConfig cfg = RunConfig::from_string(text);
  CHECK(cfg.rho == 0.05);
  CHECK(cfg.points_per_axis == 16);
  CHECK(cfg.nu == 0.02);
  CHECK(cfg.burgers == false);
  CHECK(cfg.convection == true);
  CHECK(cfg.mode == "whole_interval");
  REQUIRE(cfg.nus.size() == 3);
  CHECK(cfg.nus[1] == 1e-2);
  REQUIRE(cfg.rhos.size() == 2);

  CHECK_THROWS_AS(RunConfig::from_string("[chart]\nn = 2\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("[chart]\nbogus_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("[scheme]\nburgers = yes\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("[grid]\npoints_per_axis = 24\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("no_equals_sign\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("[romp\nn = 3\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("[run]\nexperiment = dance\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_string("[sweep]\nnus = 1e-3, 1e-2\n"), ConfigError);

  // The resolved echo reparses to the same configuration.
  const RunConfig back = RunConfig::from_string(cfg.echo());
  CHECK(back.echo() == cfg.echo());
}

TEST_CASE("run experiment: toggles off equals heat flow, in process") {
  TempDir dir("conelab_run_test");
  RunConfig cfg;
  cfg.experiment = "run";
  cfg.output_dir = (dir.path / "out").string();
  cfg.points_per_axis = 16;
  cfg.rho = 0.02;
  cfg.nu = 1e-2;
  cfg.ds = 0.05;
  cfg.s_max = 1.0;
  cfg.burgers = cfg.convection = cfg.damping = cfg.leray = false;
  cfg.quiet = true;

  std::ostringstream log;
  CHECK(run_experiment(cfg, log) == 0);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "center_series.csv"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "run_meta.json"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "config_echo.txt"));

  // Center column equals the heat flow of the data at the center.
  const ConeChart chart = cfg.chart();
  const GaussianData data = make_gaussian_data(chart, 64, 16);
  std::ifstream in(fs::path(cfg.output_dir) / "center_series.csv");
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    double s, t, w, v;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &s, &t, &w, &v) == 4);
    const VectorField expect =
        (s > 0) ? heat_convolve(data.h_rho, cfg.nu, s) : data.h_rho;
    CHECK(std::abs(w - expect.comps[0].at(8, 8, 8)) < 1e-12);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
  TempDir dir("conelab_det_test");
  RunConfig cfg;
  cfg.experiment = "run";
  cfg.points_per_axis = 16;
  cfg.rho = 0.02;
  cfg.ds = 0.05;
  cfg.s_max = 2.0;
  cfg.emit_snapshots = true;
  cfg.quiet = true;
  cfg.seed = 7;

  std::ostringstream log;
  cfg.output_dir = (dir.path / "a").string();
  REQUIRE(run_experiment(cfg, log) == 0);
  cfg.output_dir = (dir.path / "b").string();
  REQUIRE(run_experiment(cfg, log) == 0);

  for (const char* name : {"center_series.csv", "run_meta.json", "config_echo.txt"}) {
    const std::string a = slurp(dir.path / "a" / name);
    const std::string bstr = slurp(dir.path / "b" / name);
    CHECK(a == bstr);
    CHECK(!a.empty());
  }
  // run_meta differs only in output_dir-free content; snapshots byte-compare.
  for (const auto& entry : fs::directory_iterator(dir.path / "a" / "snapshots")) {
    const fs::path other = dir.path / "b" / "snapshots" / entry.path().filename();
    CHECK(slurp(entry.path()) == slurp(other));
  }
}

TEST_CASE("diagnose requires prior run outputs and names the missing file") {
  TempDir dir("conelab_diag_test");
  RunConfig cfg;
  cfg.experiment = "diagnose";
  cfg.output_dir = (dir.path / "out").string();
  cfg.run_dir = (dir.path / "missing").string();
  cfg.quiet = true;
  std::ostringstream log;
  CHECK(run_experiment(cfg, log) == 2);
  CHECK(log.str().find("run_meta.json") != std::string::npos);
}

TEST_CASE("divergence exits with code 3") {
  TempDir dir("conelab_div_test");
  RunConfig cfg;
  cfg.experiment = "run";
  cfg.output_dir = (dir.path / "out").string();
  cfg.points_per_axis = 16;
  cfg.rho = 0.5;
  cfg.ds = 0.05;
  cfg.s_max = 2.0;
  cfg.k_max = 8;
  cfg.data_amplitude = 1e5;
  cfg.mode = "whole_interval";
  cfg.whole_interval_s = 0.4;
  cfg.quiet = true;
  std::ostringstream log;
  CHECK(run_experiment(cfg, log) == 3);
}

TEST_CASE("cli binary: audit subcommand and usage errors") {
  TempDir dir("conelab_cli_test");
  const std::string cli = CONELAB_CLI_PATH;
  const std::string out = (dir.path / "audit_out").string();

  const int audit_code =
      std::system((cli + " audit --out " + out + " --quiet").c_str());
  CHECK(WEXITSTATUS(audit_code) == 0);
  CHECK(fs::exists(fs::path(out) / "audit.json"));
  CHECK(fs::exists(fs::path(out) / "audit.csv"));

  const int bad_code = std::system((cli + " frobnicate 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(bad_code) == 2);

  // A config rejected at parse time (n = 2) exits with the usage code.
  const fs::path cfg_path = dir.path / "bad.conf";
  std::ofstream(cfg_path) << "[chart]\nn = 2\n";
  const int cfg_code = std::system(
      (cli + " verify --config " + cfg_path.string() + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(cfg_code) == 2);
}
