#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vexmem/error.hpp"
#include "vexmem/exponent.hpp"
#include "vexmem/time_grid.hpp"

namespace vexmem {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"ml-eval",          "kernel-split",      "solve-mode",  "solve-pde",
                                                 "contraction-probe", "singularity-probe", "convergence", "regularity-report"};
  return names;
}

/// One harness run. Every field has a default; the config file keys carry the
/// same names as the fields.
struct RunConfig {
  std::string command;
  std::string run_id = "run";
  std::string exponent = "constant:0.5";
  double horizon = 1.0;

  // time grid; grading 0 means the default for alpha0
  std::size_t n_time = 128;
  double grading = 0.0;
  std::vector<std::size_t> levels = {64, 128, 256, 512};

  // spectral truncation
  std::size_t dimension = 1;
  std::vector<double> lengths = {1.0};
  std::size_t modes = 16;

  // single-mode problem
  double lambda = 1.0;
  double u0 = 1.0;
  std::string forcing = "zero";

  // field problem
  std::string initial = "sine:1";
  std::string field_forcing = "zero";

  // schemes and iteration
  std::string scheme = "oracle";
  std::vector<double> sigma;  // empty: select automatically
  double tolerance = 1e-10;
  std::size_t max_iter = 50;

  // ml-eval
  double ml_alpha = 1.5;
  double ml_beta = 1.0;
  double z_min = -50.0;
  double z_max = 0.0;
  std::size_t points = 101;

  // studies
  std::size_t problems = 50;
  std::uint64_t seed = 20240521;
  double min_order = 0.85;
  double spread_limit = 10.0;
  double growth_limit = 0.05;

  std::string output;
  bool verbose = false;

  double effective_grading() const;
  void validate() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

inline double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ParseError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(out)) throw ParseError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ParseError("config: '" + key + "' is out of range: '" + v + "'");
  }
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  if (v.empty()) return {};
  return parse_number_list(v, key);
}

inline std::vector<std::size_t> parse_counts(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_unsigned(key, trim(item)));
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("config: '" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace detail

/// Applies one key = value assignment; unknown keys are rejected.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string& v = value;
  if (key == "command") c.command = v;
  else if (key == "run_id") c.run_id = v;
  else if (key == "exponent") c.exponent = v;
  else if (key == "horizon") c.horizon = parse_real(key, v);
  else if (key == "n_time") c.n_time = parse_unsigned(key, v);
  else if (key == "grading") c.grading = parse_real(key, v);
  else if (key == "levels") c.levels = parse_counts(key, v);
  else if (key == "dimension") c.dimension = parse_unsigned(key, v);
  else if (key == "lengths") c.lengths = parse_reals(key, v);
  else if (key == "modes") c.modes = parse_unsigned(key, v);
  else if (key == "lambda") c.lambda = parse_real(key, v);
  else if (key == "u0") c.u0 = parse_real(key, v);
  else if (key == "forcing") c.forcing = v;
  else if (key == "initial") c.initial = v;
  else if (key == "field_forcing") c.field_forcing = v;
  else if (key == "scheme") c.scheme = v;
  else if (key == "sigma") c.sigma = parse_reals(key, v);
  else if (key == "tolerance") c.tolerance = parse_real(key, v);
  else if (key == "max_iter") c.max_iter = parse_unsigned(key, v);
  else if (key == "ml_alpha") c.ml_alpha = parse_real(key, v);
  else if (key == "ml_beta") c.ml_beta = parse_real(key, v);
  else if (key == "z_min") c.z_min = parse_real(key, v);
  else if (key == "z_max") c.z_max = parse_real(key, v);
  else if (key == "points") c.points = parse_unsigned(key, v);
  else if (key == "problems") c.problems = parse_unsigned(key, v);
  else if (key == "seed") c.seed = parse_unsigned(key, v);
  else if (key == "min_order") c.min_order = parse_real(key, v);
  else if (key == "spread_limit") c.spread_limit = parse_real(key, v);
  else if (key == "growth_limit") c.growth_limit = parse_real(key, v);
  else if (key == "output") c.output = v;
  else if (key == "verbose") c.verbose = parse_bool(key, v);
  else throw ParseError("config: unknown key '" + key + "'");
}

/// Parses `key = value` lines; `#` starts a comment; blank lines are ignored.
/// A key may appear only once.
inline RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    // '#' inside quotes is kept
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::unquote(detail::trim(std::string_view(body).substr(eq + 1)));
    if (key.empty()) throw ParseError("config line " + std::to_string(number) + ": empty key");
    if (!seen.insert(key).second) throw ParseError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    set_config_value(c, key, value);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

inline double RunConfig::effective_grading() const {
  if (grading > 0.0) return grading;
  return TimeGrid::default_grading(ExponentFunction::parse(exponent, horizon).alpha0());
}

/// Range checks; violations are reported as parse errors.
inline void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw ParseError("config: " + what); };
  if (command.empty()) fail("missing 'command'");
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
    fail("unknown command '" + command + "'");
  if (!(horizon > 0.0)) fail("horizon must be positive");
  ExponentFunction::parse(exponent, horizon);
  if (n_time < 2) fail("n_time must be at least 2");
  if (grading != 0.0 && !(grading >= 1.0)) fail("grading must be >= 1 (or 0 for the default)");
  if (levels.empty()) fail("levels must not be empty");
  for (auto n : levels)
    if (n < 2) fail("every level must be at least 2");
  if (dimension != 1 && dimension != 2) fail("dimension must be 1 or 2");
  if (lengths.size() != dimension) fail("lengths must list one positive length per dimension");
  for (double L : lengths)
    if (!(L > 0.0)) fail("lengths must be positive");
  if (modes < 1 || modes > 4096) fail("modes must be in [1, 4096]");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (scheme != "oracle" && scheme != "picard") fail("scheme must be 'oracle' or 'picard'");
  for (double s : sigma)
    if (!(s > 0.0)) fail("sigma values must be positive");
  if (!(tolerance > 0.0)) fail("tolerance must be positive");
  if (max_iter < 1) fail("max_iter must be at least 1");
  if (!(ml_alpha > 0.0 && ml_alpha <= 2.0)) fail("ml_alpha must be in (0, 2]");
  if (!(ml_beta > 0.0)) fail("ml_beta must be positive");
  if (!(z_min <= z_max) || z_max > 0.0) fail("need z_min <= z_max <= 0");
  if (points < 1) fail("points must be at least 1");
  if (problems < 1) fail("problems must be at least 1");
  if (!(spread_limit > 0.0)) fail("spread_limit must be positive");
  if (!(growth_limit >= 0.0)) fail("growth_limit must be >= 0");
}

}  // namespace vexmem
