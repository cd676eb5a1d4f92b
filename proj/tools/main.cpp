#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "conelab/config.hpp"
#include "conelab/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  bool quiet = false;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "Configuration file (key = value)");
  sub->add_option("--out", flags.out_dir, "Output directory (overrides the config)");
  sub->add_option("--seed", flags.seed, "Seed for random test fields");
  sub->add_flag("--quiet", flags.quiet, "Suppress progress output");
}

int dispatch(const std::string& experiment, const CommonFlags& flags) {
  conelab::RunConfig cfg;
  if (!flags.config_path.empty()) cfg = conelab::RunConfig::from_file(flags.config_path);
  cfg.experiment = experiment;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.quiet) cfg.quiet = true;
  cfg.validate();
  return conelab::run_experiment(cfg, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conelab: a numerical laboratory for cone-transformed "
               "incompressible-flow equations"};
  app.require_subcommand(1);

  CommonFlags flags;
  const char* names[] = {"verify", "run", "sweep", "diagnose", "audit"};
  const char* descriptions[] = {
      "Run the identity and bound checks, writing ledger.json",
      "Execute one scheme instance",
      "Viscosity sweep over the configured rho ladder",
      "Blow-up fit and forcing synthesis on stored run outputs",
      "Chain-rule audit of the transformed-equation coefficients"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], descriptions[i]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), flags);
  } catch (const conelab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
