#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "conelab/geometry.hpp"
#include "conelab/scheme.hpp"

namespace conelab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value configuration with [section] headers. Booleans are
/// true/false, lists comma-separated, comments start with '#'.
struct RunConfig {
  // [chart]
  int n = 3;
  double rho = 0.02;

  // [grid]
  int points_per_axis = 32;

  // [scheme]
  double nu = 1e-2;
  int m = 2;
  double ds = 0.05;
  double s_max = 0.0;  // 0: default horizon t(s) = rho (1 - 1e-3)
  int k_max = 6;
  double fp_tol = 1e-9;
  bool burgers = true;
  bool convection = true;
  bool damping = true;
  bool leray = true;
  std::string convection_variant = "printed_A";
  double kernel_mu = 0.75;
  double data_amplitude = 1.0;
  std::string mode = "march";       // march | whole_interval
  double whole_interval_s = 0.5;    // s-range of the whole-interval iteration

  // [run]
  std::string experiment = "verify";  // verify | run | sweep | diagnose | audit
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  bool emit_snapshots = false;
  bool quiet = false;

  // [sweep]
  std::vector<double> nus = {1e-1, 1e-2, 1e-3};
  std::vector<double> rhos = {0.05, 0.02};

  // [diagnose]
  std::string run_dir;  // defaults to output_dir when empty

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_string(const std::string& text, const std::string& origin = "<string>");

  void validate() const;  // throws ConfigError
  ConeChart chart() const { return ConeChart(n, rho); }
  SchemeConfig scheme_config() const;

  /// Deterministic serialization of the fully resolved configuration.
  std::string echo() const;
};

}  // namespace conelab
