#include "conelab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "conelab/report.hpp"

namespace conelab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Parsed {
  std::map<std::string, std::string> kv;  // "section.key" -> value
};

Parsed parse_text(const std::string& text, const std::string& origin) {
  Parsed out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    out.kv[section + "." + key] = value;
  }
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError("config: cannot parse '" + v + "' as a number for " + key);
  }
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return i;
  } catch (...) {
    throw ConfigError("config: cannot parse '" + v + "' as an integer for " + key);
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config: expected true/false for " + key + ", got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    out.push_back(to_double(t, key));
  }
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_string(text, path.string());
}

RunConfig RunConfig::from_string(const std::string& text, const std::string& origin) {
  const Parsed parsed = parse_text(text, origin);
  RunConfig cfg;
  for (const auto& [key, value] : parsed.kv) {
    if (key == "chart.n") cfg.n = static_cast<int>(to_int(value, key));
    else if (key == "chart.rho") cfg.rho = to_double(value, key);
    else if (key == "grid.points_per_axis") cfg.points_per_axis = static_cast<int>(to_int(value, key));
    else if (key == "scheme.nu") cfg.nu = to_double(value, key);
    else if (key == "scheme.m") cfg.m = static_cast<int>(to_int(value, key));
    else if (key == "scheme.ds") cfg.ds = to_double(value, key);
    else if (key == "scheme.s_max") cfg.s_max = to_double(value, key);
    else if (key == "scheme.k_max") cfg.k_max = static_cast<int>(to_int(value, key));
    else if (key == "scheme.fp_tol") cfg.fp_tol = to_double(value, key);
    else if (key == "scheme.burgers") cfg.burgers = to_bool(value, key);
    else if (key == "scheme.convection") cfg.convection = to_bool(value, key);
    else if (key == "scheme.damping") cfg.damping = to_bool(value, key);
    else if (key == "scheme.leray") cfg.leray = to_bool(value, key);
    else if (key == "scheme.convection_variant") cfg.convection_variant = value;
    else if (key == "scheme.kernel_mu") cfg.kernel_mu = to_double(value, key);
    else if (key == "scheme.data_amplitude") cfg.data_amplitude = to_double(value, key);
    else if (key == "scheme.mode") cfg.mode = value;
    else if (key == "scheme.whole_interval_s") cfg.whole_interval_s = to_double(value, key);
    else if (key == "run.experiment") cfg.experiment = value;
    else if (key == "run.output_dir") cfg.output_dir = value;
    else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(to_int(value, key));
    else if (key == "run.emit_snapshots") cfg.emit_snapshots = to_bool(value, key);
    else if (key == "run.quiet") cfg.quiet = to_bool(value, key);
    else if (key == "sweep.nus") cfg.nus = to_list(value, key);
    else if (key == "sweep.rhos") cfg.rhos = to_list(value, key);
    else if (key == "diagnose.run_dir") cfg.run_dir = value;
    else throw ConfigError("config: unknown key '" + key + "' in " + origin);
  }
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (n < 3)
    throw ConfigError("config: chart.n must be >= 3 (the construction requires it), got " +
                      std::to_string(n));
  if (!(rho > 0.0)) throw ConfigError("config: chart.rho must be positive");
  if (points_per_axis < 16 || (points_per_axis & (points_per_axis - 1)) != 0)
    throw ConfigError("config: grid.points_per_axis must be a power of two >= 16");
  if (!(nu > 0.0)) throw ConfigError("config: scheme.nu must be positive");
  if (m < 0) throw ConfigError("config: scheme.m must be nonnegative");
  if (!(ds > 0.0)) throw ConfigError("config: scheme.ds must be positive");
  if (k_max < 1) throw ConfigError("config: scheme.k_max must be >= 1");
  if (!(fp_tol > 0.0)) throw ConfigError("config: scheme.fp_tol must be positive");
  if (convection_variant != "printed_A" && convection_variant != "printed_B")
    throw ConfigError("config: scheme.convection_variant must be printed_A or printed_B");
  if (!(kernel_mu > 0.0) || !(kernel_mu < 1.0))
    throw ConfigError("config: scheme.kernel_mu must lie in (0, 1)");
  if (mode != "march" && mode != "whole_interval")
    throw ConfigError("config: scheme.mode must be march or whole_interval");
  if (!(whole_interval_s > 0.0))
    throw ConfigError("config: scheme.whole_interval_s must be positive");
  const bool known = experiment == "verify" || experiment == "run" ||
                     experiment == "sweep" || experiment == "diagnose" ||
                     experiment == "audit";
  if (!known)
    throw ConfigError("config: run.experiment must be one of verify|run|sweep|diagnose|audit");
  for (std::size_t i = 1; i < nus.size(); ++i)
    if (!(nus[i] < nus[i - 1]))
      throw ConfigError("config: sweep.nus must be strictly decreasing");
  for (const double r : rhos)
    if (!(r > 0.0)) throw ConfigError("config: sweep.rhos must be positive");
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig cfg(chart(), cylinder_grid(points_per_axis));
  cfg.nu = nu;
  cfg.m = m;
  cfg.ds = ds;
  cfg.s_max = s_max;
  cfg.k_max = k_max;
  cfg.fp_tol = fp_tol;
  cfg.toggles = TermToggles{burgers, convection, damping, leray};
  cfg.convection_variant = (convection_variant == "printed_A")
                               ? ConvectionVariant::PrintedA
                               : ConvectionVariant::PrintedB;
  cfg.kernel_mu = kernel_mu;
  return cfg;
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  out << "[chart]\n";
  out << "n = " << n << "\n";
  out << "rho = " << format_double(rho) << "\n";
  out << "\n[grid]\n";
  out << "points_per_axis = " << points_per_axis << "\n";
  out << "\n[scheme]\n";
  out << "nu = " << format_double(nu) << "\n";
  out << "m = " << m << "\n";
  out << "ds = " << format_double(ds) << "\n";
  out << "s_max = " << format_double(s_max) << "\n";
  out << "k_max = " << k_max << "\n";
  out << "fp_tol = " << format_double(fp_tol) << "\n";
  out << "burgers = " << (burgers ? "true" : "false") << "\n";
  out << "convection = " << (convection ? "true" : "false") << "\n";
  out << "damping = " << (damping ? "true" : "false") << "\n";
  out << "leray = " << (leray ? "true" : "false") << "\n";
  out << "convection_variant = " << convection_variant << "\n";
  out << "kernel_mu = " << format_double(kernel_mu) << "\n";
  out << "data_amplitude = " << format_double(data_amplitude) << "\n";
  out << "mode = " << mode << "\n";
  out << "whole_interval_s = " << format_double(whole_interval_s) << "\n";
  out << "\n[run]\n";
  out << "experiment = " << experiment << "\n";
  out << "output_dir = " << output_dir << "\n";
  out << "seed = " << seed << "\n";
  out << "emit_snapshots = " << (emit_snapshots ? "true" : "false") << "\n";
  out << "quiet = " << (quiet ? "true" : "false") << "\n";
  out << "\n[sweep]\n";
  out << "nus = " << format_double_list(nus) << "\n";
  out << "rhos = " << format_double_list(rhos) << "\n";
  out << "\n[diagnose]\n";
  out << "run_dir = " << run_dir << "\n";
  return out.str();
}

}  // namespace conelab
