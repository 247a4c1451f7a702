#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "vexmem/config.hpp"
#include "vexmem/csv.hpp"
#include "vexmem/error.hpp"
#include "vexmem/field.hpp"
#include "vexmem/forcing.hpp"
#include "vexmem/kernel.hpp"
#include "vexmem/mode_solver.hpp"
#include "vexmem/special_functions.hpp"
#include "vexmem/spectral.hpp"
#include "vexmem/time_grid.hpp"

namespace vexmem {

/// Process exit statuses of the harness.
namespace exit_status {
inline constexpr int ok = 0;
inline constexpr int parse = 2;
inline constexpr int numerical = 3;
inline constexpr int invariant = 4;
inline constexpr int io = 5;
}  // namespace exit_status

inline int status_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parse:
    case ErrorCategory::domain:
    case ErrorCategory::input: return exit_status::parse;
    case ErrorCategory::accuracy:
    case ErrorCategory::convergence:
    case ErrorCategory::resolution:
    case ErrorCategory::truncation: return exit_status::numerical;
    case ErrorCategory::invariant: return exit_status::invariant;
    case ErrorCategory::io: return exit_status::io;
  }
  return exit_status::numerical;
}

struct InvariantCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct RunResult {
  int status = exit_status::ok;
  std::string category;  // empty on success
  std::string message;
  CsvTable table;
  std::vector<std::string> summary;
  std::vector<InvariantCheck> checks;
};

namespace harness {

inline std::string num(double v) { return csv_number(v); }

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline SplitKernel make_kernel(const RunConfig& c) {
  return SplitKernel(ExponentFunction::parse(c.exponent, c.horizon), c.horizon);
}

inline TimeGrid make_grid(const RunConfig& c, std::size_t n) { return TimeGrid(c.horizon, n, c.effective_grading()); }

inline SpectralDomain make_domain(const RunConfig& c) { return SpectralDomain(c.lengths, c.modes); }

/// "zero", "coeffs:c1,c2,...", "sine:k" or "bubble".
inline std::vector<double> parse_initial(const RunConfig& c, const SpectralDomain& d) {
  const std::string& s = c.initial;
  if (s == "zero") return std::vector<double>(d.modes(), 0.0);
  if (s.rfind("coeffs:", 0) == 0) {
    auto coeffs = detail::parse_number_list(std::string_view(s).substr(7), "initial");
    if (coeffs.size() > d.modes()) throw ParseError("initial: more coefficients than modes");
    coeffs.resize(d.modes(), 0.0);
    return coeffs;
  }
  const auto& L = d.lengths();
  SpatialFunction f;
  if (s.rfind("sine:", 0) == 0) {
    const auto k = detail::parse_number_list(std::string_view(s).substr(5), "initial");
    if (k.size() != 1 || k[0] < 1 || k[0] != std::floor(k[0])) throw ParseError("initial: 'sine:k' needs a positive integer k");
    const double w = k[0] * std::numbers::pi;
    f = [=](double x, double y) {
      double v = std::sin(w * x / L[0]);
      if (L.size() == 2) v *= std::sin(w * y / L[1]);
      return v;
    };
  } else if (s == "bubble") {
    f = [=](double x, double y) {
      double v = x * (L[0] - x);
      if (L.size() == 2) v *= y * (L[1] - y);
      return v;
    };
  } else {
    throw ParseError("initial: expected zero, coeffs:..., sine:k or bubble, got '" + s + "'");
  }
  detail::check_dirichlet(d, f);
  return project(d, f);
}

/// "zero" or "phi<m>@<forcing>+phi<m>@<forcing>+...", modes counted from 1.
inline std::vector<ScalarForcing> parse_field_forcing(const RunConfig& c, const SpectralDomain& d) {
  std::vector<ScalarForcing> out(d.modes(), ScalarForcing::zero());
  const std::string& s = c.field_forcing;
  if (s == "zero") return out;
  std::vector<std::string> terms;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == '+' && s.compare(i + 1, 3, "phi") == 0)) {
      terms.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  std::vector<bool> used(d.modes(), false);
  for (const auto& t : terms) {
    const auto at = t.find('@');
    if (t.rfind("phi", 0) != 0 || at == std::string::npos)
      throw ParseError("field_forcing: expected 'phi<m>@<forcing>', got '" + t + "'");
    const auto m = detail::parse_unsigned("field_forcing", t.substr(3, at - 3));
    if (m < 1 || m > d.modes()) throw ParseError("field_forcing: mode index out of range in '" + t + "'");
    if (used[m - 1]) throw ParseError("field_forcing: mode " + std::to_string(m) + " given twice");
    used[m - 1] = true;
    out[m - 1] = ScalarForcing::parse(t.substr(at + 1));
  }
  return out;
}

inline void check(RunResult& r, std::string name, bool passed, std::string detail) {
  r.summary.push_back("check " + name + ": " + (passed ? "pass" : "FAIL") + " (" + detail + ")");
  r.checks.push_back({std::move(name), passed, std::move(detail)});
}

inline void ml_eval(const RunConfig& c, RunResult& r) {
  const MLParams p{c.ml_alpha, c.ml_beta};
  r.table.header = {"alpha", "beta", "z", "value", "regime"};
  for (std::size_t i = 0; i < c.points; ++i) {
    const double z = c.points == 1 ? c.z_min
                                   : c.z_min + (c.z_max - c.z_min) * static_cast<double>(i) / static_cast<double>(c.points - 1);
    r.table.add_row({num(p.alpha), num(p.beta), num(z), num(mittag_leffler(p, z)), ml::regime_name(ml::select_regime(p.alpha, z))});
  }
  r.summary.push_back("evaluated E_{" + num(p.alpha) + "," + num(p.beta) + "} at " + std::to_string(c.points) + " points");
}

inline void kernel_split(const RunConfig& c, RunResult& r) {
  const SplitKernel k = make_kernel(c);
  r.table.header = {"t", "kernel", "beta_part", "gtilde", "split_residual", "gtilde_prime"};
  double worst = 0.0;
  for (std::size_t i = 1; i <= c.points; ++i) {
    const double t = c.horizon * std::pow(static_cast<double>(i) / static_cast<double>(c.points), 3.0);
    const double kv = k.kernel(t);
    const double bv = k.beta_part(t);
    const double gv = k.gtilde(t);
    const double res = bv + gv - kv;
    worst = std::max(worst, std::abs(res));
    r.table.add_row({num(t), num(kv), num(bv), num(gv), num(res), num(k.gtilde_prime(t))});
  }
  check(r, "split_consistency", worst <= k.quad_tolerance(), "max |beta + gtilde - k| = " + num(worst));
}

inline ModeProblem mode_problem(const RunConfig& c) {
  return ModeProblem(make_kernel(c), c.lambda, c.u0, ScalarForcing::parse(c.forcing));
}

inline ModeSolution solve_mode_with(const RunConfig& c, const ModeProblem& p, const TimeGrid& g, double* sigma_used) {
  if (c.scheme == "oracle") {
    if (sigma_used) *sigma_used = 0.0;
    return volterra_oracle_solve(p, g);
  }
  const PicardOperator op(p, g);
  const double sigma = c.sigma.empty() ? select_sigma(op) : c.sigma.front();
  if (sigma_used) *sigma_used = sigma;
  return picard_solve(op, sigma, c.tolerance, c.max_iter);
}

inline void solve_mode(const RunConfig& c, RunResult& r) {
  const ModeProblem p = mode_problem(c);
  const TimeGrid g = make_grid(c, c.n_time);
  double sigma = 0.0;
  const ModeSolution s = solve_mode_with(c, p, g, &sigma);
  r.table.header = {"n", "t", "u", "du"};
  for (std::size_t n = 0; n < g.size(); ++n) r.table.add_row({csv_number(n), num(g[n]), num(s.values[n]), num(s.derivative[n])});
  r.summary.push_back("scheme " + c.scheme + ", sigma " + num(sigma) + ", iterations " + std::to_string(s.iterations) +
                      ", residual " + num(s.residual));
}

inline std::vector<std::string> norm_header() {
  return {"run_id",           "n_modes",          "n_time",          "grading",         "sigma",
          "scheme",           "h1l2_norm",        "h1h2_norm",       "weighted_second", "unweighted_second",
          "data_h2",          "data_h4",          "f_h1l2",          "f_h1h2",          "stability_ratio",
          "regularity_ratio"};
}

inline std::vector<std::string> norm_row(const std::string& id, std::size_t modes, const TimeGrid& g, double sigma,
                                         const std::string& scheme, const NormReport& n) {
  return {id,
          csv_number(modes),
          csv_number(g.intervals()),
          num(g.grading()),
          num(sigma),
          scheme,
          num(n.h1l2_norm),
          num(n.h1h2_norm),
          num(n.weighted_second),
          num(n.unweighted_second),
          num(n.data_h2),
          num(n.data_h4),
          num(n.f_h1l2),
          num(n.f_h1h2),
          num(n.stability_ratio),
          num(n.regularity_ratio)};
}

inline FieldSolveOptions field_options(const RunConfig& c) {
  FieldSolveOptions o;
  o.scheme = c.scheme == "picard" ? Scheme::picard : Scheme::oracle;
  o.sigma = c.sigma.empty() ? 0.0 : c.sigma.front();
  o.tolerance = c.tolerance;
  o.max_iterations = c.max_iter;
  return o;
}

inline void solve_pde(const RunConfig& c, RunResult& r) {
  const SpectralDomain d = make_domain(c);
  const FieldProblem p(d, make_kernel(c), c.horizon, parse_initial(c, d), parse_field_forcing(c, d));
  const TimeGrid g = make_grid(c, c.n_time);
  const FieldSolution s = solve_field(p, g, field_options(c));
  const double sigma = s.sigma.empty() ? 0.0 : *std::max_element(s.sigma.begin(), s.sigma.end());
  r.table.header = norm_header();
  r.table.add_row(norm_row(c.run_id, d.modes(), g, sigma, c.scheme, s.report));
  const auto& n = s.report;
  r.summary.push_back("h1l2_norm " + num(n.h1l2_norm) + ", h1h2_norm " + num(n.h1h2_norm) + ", weighted_second " +
                      num(n.weighted_second) + ", unweighted_second " + num(n.unweighted_second));
  r.summary.push_back("data_h2 " + num(n.data_h2) + ", data_h4 " + num(n.data_h4) + ", f_h1l2 " + num(n.f_h1l2) +
                      ", f_h1h2 " + num(n.f_h1h2));
  r.summary.push_back("stability_ratio " + num(n.stability_ratio) + ", regularity_ratio " + num(n.regularity_ratio));
  const bool finite = (n.data_h2 + n.f_h1l2 == 0.0 || std::isfinite(n.stability_ratio)) &&
                      (n.data_h4 + n.f_h1h2 == 0.0 || std::isfinite(n.regularity_ratio));
  check(r, "finite_ratios", finite, "ratios finite where denominators are nonzero");
}

inline void contraction(const RunConfig& c, RunResult& r) {
  const ModeProblem p = mode_problem(c);
  const TimeGrid g = make_grid(c, c.n_time);
  const std::vector<double> sigmas = c.sigma.empty() ? std::vector<double>{1.0, 10.0, 100.0, 1000.0} : c.sigma;
  const ContractionReport rep = contraction_probe(p, g, sigmas);
  r.table.header = {"sigma", "factor"};
  for (std::size_t i = 0; i < rep.sigma.size(); ++i) r.table.add_row({num(rep.sigma[i]), num(rep.factor[i])});
  for (const auto& w : rep.warnings) r.summary.push_back("warning: " + w);
  r.summary.push_back("slope over the largest decade " + num(rep.slope));
  if (rep.trivial())
    check(r, "contraction_monotone", true, "map independent of v; every factor is 0");
  else
    check(r, "contraction_monotone", rep.strictly_decreasing(), "factors strictly decreasing in sigma");
}

inline void singularity(const RunConfig& c, RunResult& r) {
  const ModeProblem p = mode_problem(c);
  const TimeGrid g = make_grid(c, c.n_time);
  double sigma = 0.0;
  const ModeSolution s = solve_mode_with(c, p, g, &sigma);
  const SingularityEstimate e = singularity_probe(p, s);
  r.table.header = {"kind", "node", "t", "value"};
  for (std::size_t i = 0; i < e.nodes.size(); ++i)
    r.table.add_row({"sample", csv_number(e.nodes[i]), num(g[e.nodes[i]]), num(e.samples[i])});
  r.table.add_row({"limit", "", "0", num(e.limit)});
  r.table.add_row({"predicted", "", "0", num(e.predicted)});
  r.summary.push_back("extrapolated limit of t^alpha0 u'' " + num(e.limit) + ", predicted " + num(e.predicted));
}

inline void convergence(const RunConfig& c, RunResult& r) {
  const ModeProblem p = mode_problem(c);
  std::vector<std::size_t> levels = c.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const bool exact = p.kernel.exponent().is_constant() && ScalarForcing::parse(c.forcing).description == "zero";
  const std::size_t finest = 2 * levels.back();
  for (auto n : levels)
    if (finest % n != 0) throw ParseError("convergence: every level must divide twice the largest level");
  std::optional<ModeSolution> reference;
  if (!exact) reference = solve_mode_with(c, p, make_grid(c, finest), nullptr);
  const double a = 2.0 - p.kernel.alpha0();
  r.table.header = {"n_time", "max_error", "order", "reference"};
  double previous = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> orders;
  for (auto n : levels) {
    const TimeGrid g = make_grid(c, n);
    const ModeSolution s = solve_mode_with(c, p, g, nullptr);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double ref = exact ? p.u0 * mittag_leffler({a, 1.0}, -p.lambda * std::pow(g[k], a))
                               : reference->values[k * (finest / n)];
      err = std::max(err, std::abs(s.values[k] - ref));
    }
    const double order = std::log2(previous / err);
    if (!std::isnan(previous)) orders.push_back(order);
    r.table.add_row({csv_number(n), num(err), num(order), exact ? "exact" : "refined"});
    previous = err;
  }
  const double worst = orders.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : *std::min_element(orders.begin(), orders.end());
  check(r, "convergence_order", orders.empty() || worst >= c.min_order,
        "smallest observed order " + num(worst) + ", required " + num(c.min_order));
}

inline void regularity_report(const RunConfig& c, RunResult& r) {
  const SpectralDomain d = make_domain(c);
  const SplitKernel k = make_kernel(c);
  const auto family = random_field_family(d, k, c.horizon, c.problems, c.seed);
  std::vector<std::size_t> levels = c.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const FieldSolveOptions opt = field_options(c);
  r.table.header = norm_header();
  std::vector<std::vector<NormReport>> reports(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const TimeGrid g = make_grid(c, levels[l]);
    const auto memory = std::make_shared<MemoryWeights>(MemoryWeights::build(k, g));
    for (std::size_t i = 0; i < family.size(); ++i) {
      const FieldSolution s = solve_field(family[i], g, opt, memory);
      const double sigma = s.sigma.empty() ? 0.0 : *std::max_element(s.sigma.begin(), s.sigma.end());
      reports[l].push_back(s.report);
      r.table.add_row(norm_row(c.run_id + "-" + std::to_string(i), d.modes(), g, sigma, c.scheme, s.report));
    }
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::vector<double> st, rg;
    double unweighted = 0.0;
    for (const auto& n : reports[l]) {
      st.push_back(n.stability_ratio);
      rg.push_back(n.regularity_ratio);
      unweighted = std::max(unweighted, n.unweighted_second);
    }
    const double st_max = *std::max_element(st.begin(), st.end());
    const double rg_max = *std::max_element(rg.begin(), rg.end());
    const double st_med = median(st);
    const double rg_med = median(rg);
    const std::string tag = "N=" + std::to_string(levels[l]);
    r.summary.push_back(tag + ": stability_ratio max " + num(st_max) + " median " + num(st_med) + "; regularity_ratio max " +
                        num(rg_max) + " median " + num(rg_med) + "; largest unweighted second-derivative norm " +
                        num(unweighted));
    check(r, "stability_spread " + tag, st_max <= c.spread_limit * st_med,
          "max/median " + num(st_max / st_med) + ", limit " + num(c.spread_limit));
    check(r, "regularity_spread " + tag, rg_max <= c.spread_limit * rg_med,
          "max/median " + num(rg_max / rg_med) + ", limit " + num(c.spread_limit));
  }
  if (levels.size() > 1) {
    double growth = -std::numeric_limits<double>::infinity();
    double unweighted_growth = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < family.size(); ++i) {
      growth = std::max(growth, reports.back()[i].regularity_ratio / reports.front()[i].regularity_ratio - 1.0);
      if (reports.front()[i].unweighted_second > 0.0)
        unweighted_growth =
            std::max(unweighted_growth, reports.back()[i].unweighted_second / reports.front()[i].unweighted_second - 1.0);
    }
    r.summary.push_back("largest relative growth from N=" + std::to_string(levels.front()) + " to N=" +
                        std::to_string(levels.back()) + ": regularity_ratio " + num(growth) +
                        ", unweighted second-derivative norm " + num(unweighted_growth));
    check(r, "regularity_refinement", growth <= c.growth_limit,
          "largest growth " + num(growth) + ", limit " + num(c.growth_limit));
  }
}

}  // namespace harness

/// Runs one configured command. Never throws; failures are reported through
/// the status and category fields.
inline RunResult execute(const RunConfig& c) {
  RunResult r;
  try {
    c.validate();
    if (c.command == "ml-eval") harness::ml_eval(c, r);
    else if (c.command == "kernel-split") harness::kernel_split(c, r);
    else if (c.command == "solve-mode") harness::solve_mode(c, r);
    else if (c.command == "solve-pde") harness::solve_pde(c, r);
    else if (c.command == "contraction-probe") harness::contraction(c, r);
    else if (c.command == "singularity-probe") harness::singularity(c, r);
    else if (c.command == "convergence") harness::convergence(c, r);
    else if (c.command == "regularity-report") harness::regularity_report(c, r);
    for (const auto& chk : r.checks) {
      if (!chk.passed) {
        r.status = exit_status::invariant;
        r.category = category_name(ErrorCategory::invariant);
        r.message = "invariant check failed: " + chk.name;
        break;
      }
    }
  } catch (const Error& e) {
    r.status = status_for(e.category());
    r.category = category_name(e.category());
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = exit_status::numerical;
    r.category = "internal";
    r.message = e.what();
  }
  return r;
}

/// Executes the command, writes the CSV to c.output (or to `out` when no path
/// is set) and the summary to `log`. Returns the exit status.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& log) {
  RunResult r = execute(c);
  // a failed run still writes the partial table when the failure was an invariant check
  if (r.status == exit_status::ok || r.status == exit_status::invariant) {
    try {
      if (c.output.empty() || c.output == "-")
        emit_csv(r.table, out);
      else
        emit_csv(r.table, c.output);
    } catch (const Error& e) {
      r.status = status_for(e.category());
      r.category = category_name(e.category());
      r.message = e.what();
    }
  }
  log << "command: " << c.command << "\n";
  for (const auto& line : r.summary) log << line << "\n";
  if (r.status != exit_status::ok)
    log << "error: category=" << r.category << " status=" << r.status << " message=" << r.message << "\n";
  return r.status;
}

}  // namespace vexmem
