#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vexmem/error.hpp"
#include "vexmem/forcing.hpp"
#include "vexmem/kernel.hpp"
#include "vexmem/mode_solver.hpp"
#include "vexmem/spectral.hpp"
#include "vexmem/time_grid.hpp"

namespace vexmem {

/// f(x, y, t); y is ignored in one dimension.
using FieldFunction = std::function<double(double x, double y, double t)>;

/// du/dt - k * Laplacian u = f on the domain, u = 0 on its boundary, u(0) = u0,
/// stored by its spectral coefficients.
struct FieldProblem {
  FieldProblem(SpectralDomain domain_, SplitKernel kernel_, double horizon_, std::vector<double> initial_,
               std::vector<ScalarForcing> forcing_)
      : domain(std::move(domain_)), kernel(std::move(kernel_)), horizon(horizon_), initial(std::move(initial_)),
        forcing(std::move(forcing_)) {
    if (!(horizon > 0.0) || horizon > kernel.horizon() * (1.0 + 1e-12))
      throw DomainError("FieldProblem: horizon must be positive and within the kernel horizon");
    initial.resize(domain.modes(), 0.0);
    if (forcing.size() > domain.modes()) throw TruncationError("FieldProblem: forcing has more modes than retained", 0.0);
    while (forcing.size() < domain.modes()) forcing.push_back(ScalarForcing::zero());
  }

  /// Projects a pointwise initial value and forcing field. u0 must vanish on the
  /// boundary; it is checked at sample points.
  static FieldProblem from_functions(SpectralDomain domain, SplitKernel kernel, double horizon, const SpatialFunction& u0,
                                     const FieldFunction& f = nullptr, const FieldFunction& f_t = nullptr);

  SpectralDomain domain;
  SplitKernel kernel;
  double horizon;
  std::vector<double> initial;
  std::vector<ScalarForcing> forcing;
};

namespace detail {

inline void check_dirichlet(const SpectralDomain& d, const SpatialFunction& u0) {
  const auto& L = d.lengths();
  constexpr int samples = 33;
  double scale = 1.0;
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    if (d.dimension() == 1) {
      worst = std::max({worst, std::abs(u0(0.0, 0.0)), std::abs(u0(L[0], 0.0))});
      scale = std::max(scale, std::abs(u0(s * L[0], 0.0)));
    } else {
      worst = std::max({worst, std::abs(u0(s * L[0], 0.0)), std::abs(u0(s * L[0], L[1])), std::abs(u0(0.0, s * L[1])),
                        std::abs(u0(L[0], s * L[1]))});
      scale = std::max(scale, std::abs(u0(s * L[0], 0.5 * L[1])));
    }
  }
  if (!(worst <= 1e-10 * scale)) throw InputError("initial value does not vanish on the boundary");
}

/// Projections of f(., t) and f_t(., t), memoized by t; every mode solver
/// samples the same time nodes.
class FieldProjectionCache {
 public:
  FieldProjectionCache(SpectralDomain d, FieldFunction f, FieldFunction f_t)
      : domain_(std::move(d)), f_(std::move(f)), f_t_(std::move(f_t)) {}

  double value(std::size_t m, double t) { return lookup(values_, f_, t)[m]; }
  double derivative(std::size_t m, double t) { return lookup(derivatives_, f_t_, t)[m]; }

 private:
  const std::vector<double>& lookup(std::map<double, std::vector<double>>& cache, const FieldFunction& fn, double t) {
    std::lock_guard lock(mutex_);
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    auto coeffs = project_with(domain_, [&](double x, double y) { return fn(x, y, t); }, gauss_legendre(16)).coefficients;
    return cache.emplace(t, std::move(coeffs)).first->second;
  }

  SpectralDomain domain_;
  FieldFunction f_;
  FieldFunction f_t_;
  std::mutex mutex_;
  std::map<double, std::vector<double>> values_;
  std::map<double, std::vector<double>> derivatives_;
};

}  // namespace detail

inline FieldProblem FieldProblem::from_functions(SpectralDomain domain, SplitKernel kernel, double horizon,
                                                 const SpatialFunction& u0, const FieldFunction& f, const FieldFunction& f_t) {
  detail::check_dirichlet(domain, u0);
  auto initial = project(domain, u0);
  std::vector<ScalarForcing> forcing;
  if (f) {
    if (!f_t) throw InputError("FieldProblem: the forcing needs its time derivative");
    auto cache = std::make_shared<detail::FieldProjectionCache>(domain, f, f_t);
    for (std::size_t m = 0; m < domain.modes(); ++m)
      forcing.push_back({[cache, m](double t) { return cache->value(m, t); },
                         [cache, m](double t) { return cache->derivative(m, t); }, "projected"});
  }
  return FieldProblem(std::move(domain), std::move(kernel), horizon, std::move(initial), std::move(forcing));
}

enum class Scheme { oracle, picard };

inline const char* scheme_name(Scheme s) { return s == Scheme::oracle ? "oracle" : "picard"; }

struct FieldSolveOptions {
  Scheme scheme = Scheme::oracle;
  /// Picard weight; 0 selects it per mode with select_sigma.
  double sigma = 0.0;
  double tolerance = 1e-10;
  std::size_t max_iterations = 50;
};

struct NormReport {
  double h1l2_norm = 0.0;        // ||u||_{H1(L2)}
  double h1h2_norm = 0.0;        // ||u||_{H1(H2)}
  double weighted_second = 0.0;  // ||t^(alpha0/2) u_tt||_{L2(L2)}
  double unweighted_second = 0.0;  // ||u_tt||_{L2(L2)}, for comparison
  double data_h2 = 0.0;          // ||u0||_{H2}
  double data_h4 = 0.0;          // ||u0||_{H4}
  double f_h1l2 = 0.0;           // ||f||_{H1(L2)}
  double f_h1h2 = 0.0;           // ||f||_{H1(H2)}
  double stability_ratio = 0.0;
  double regularity_ratio = 0.0;
};

struct FieldSolution {
  std::vector<ModeSolution> modes;
  NormReport report;
  /// sigma used for each mode (0 for the oracle)
  std::vector<double> sigma;
};

namespace detail {

/// int_0^T q^2 by the trapezoid rule on the nodes.
inline double trapezoid_squared(std::span<const double> q, const TimeGrid& g) {
  double s = 0.0;
  for (std::size_t n = 0; n + 1 < g.size(); ++n) s += 0.5 * (g[n + 1] - g[n]) * (q[n] * q[n] + q[n + 1] * q[n + 1]);
  return s;
}

/// int_0^T t^w (u'')^2 with three-point second differences at interior nodes
/// and dual-cell weights (t_{n+1} - t_{n-1})/2.
inline double second_derivative_squared(std::span<const double> u, const TimeGrid& g, double weight_power) {
  double s = 0.0;
  for (std::size_t n = 1; n + 1 < g.size(); ++n) {
    const double d2 = second_difference(u, g, n);
    s += 0.5 * (g[n + 1] - g[n - 1]) * std::pow(g[n], weight_power) * d2 * d2;
  }
  return s;
}

/// ||f||^2_{H1(0,T)} by 8-point Gauss-Legendre on each grid interval.
inline double forcing_h1_squared(const ScalarForcing& f, const TimeGrid& g) {
  const auto& rule = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t n = 0; n + 1 < g.size(); ++n)
    s += rule.integrate(
        [&](double t) {
          const double v = f.value(t);
          const double d = f.derivative(t);
          return v * v + d * d;
        },
        g[n], g[n + 1]);
  return s;
}

inline double ratio(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// Norms of an assembled solution.
inline NormReport compute_norms(const FieldProblem& p, const TimeGrid& g, const std::vector<ModeSolution>& modes) {
  const auto& lam = p.domain.eigenvalues();
  const double a0 = p.kernel.alpha0();
  double h1l2 = 0.0, h1h2 = 0.0, w2 = 0.0, u2 = 0.0, fl2 = 0.0, fh2 = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto& s = modes[m];
    const double h1 = detail::trapezoid_squared(s.values, g) + detail::trapezoid_squared(s.derivative, g);
    h1l2 += h1;
    h1h2 += lam[m] * lam[m] * h1;
    w2 += detail::second_derivative_squared(s.values, g, a0);
    u2 += detail::second_derivative_squared(s.values, g, 0.0);
    const double fh1 = detail::forcing_h1_squared(p.forcing[m], g);
    fl2 += fh1;
    fh2 += lam[m] * lam[m] * fh1;
  }
  NormReport r;
  r.h1l2_norm = std::sqrt(h1l2);
  r.h1h2_norm = std::sqrt(h1h2);
  r.weighted_second = std::sqrt(w2);
  r.unweighted_second = std::sqrt(u2);
  r.data_h2 = sobolev_norm(p.domain, p.initial, 2.0);
  r.data_h4 = sobolev_norm(p.domain, p.initial, 4.0);
  r.f_h1l2 = std::sqrt(fl2);
  r.f_h1h2 = std::sqrt(fh2);
  r.stability_ratio = detail::ratio(r.h1l2_norm, r.data_h2 + r.f_h1l2);
  r.regularity_ratio = detail::ratio(r.weighted_second + r.h1h2_norm, r.data_h4 + r.f_h1h2);
  return r;
}

/// Solves every retained mode and assembles the norm report. The memory
/// weights depend only on (kernel, grid) and are shared by all modes; pass
/// them in to reuse them across problems.
inline FieldSolution solve_field(const FieldProblem& p, const TimeGrid& g, const FieldSolveOptions& opt,
                                 std::shared_ptr<const MemoryWeights> memory) {
  if (g.horizon() != p.horizon) throw InputError("solve_field: grid horizon differs from the problem horizon");
  if (!memory) memory = std::make_shared<MemoryWeights>(MemoryWeights::build(p.kernel, g));
  FieldSolution out;
  for (std::size_t m = 0; m < p.domain.modes(); ++m) {
    try {
      const ModeProblem mp(p.kernel, p.domain.eigenvalues()[m], p.initial[m], p.forcing[m]);
      if (opt.scheme == Scheme::oracle) {
        out.modes.push_back(volterra_oracle_solve(mp, g, *memory));
        out.sigma.push_back(0.0);
      } else {
        const PicardOperator op(mp, g, memory);
        const double sigma = opt.sigma > 0.0 ? opt.sigma : select_sigma(op);
        out.modes.push_back(picard_solve(op, sigma, opt.tolerance, opt.max_iterations));
        out.sigma.push_back(sigma);
      }
    } catch (const Error& e) {
      throw ModeError(m + 1, e);
    }
  }
  out.report = compute_norms(p, g, out.modes);
  return out;
}

inline FieldSolution solve_field(const FieldProblem& p, const TimeGrid& g, const FieldSolveOptions& opt = {}) {
  return solve_field(p, g, opt, nullptr);
}

/// u(x, y, t_n) from the modal solution.
inline double evaluate_field(const SpectralDomain& d, const FieldSolution& s, std::size_t n, double x, double y = 0.0) {
  double v = 0.0;
  for (std::size_t m = 0; m < s.modes.size(); ++m) v += s.modes[m].values[n] * d.eigenfunction(m, x, y);
  return v;
}

/// (k * q)(t) = int_0^t k(s) q(t - s) ds. With s = t y^(1/(1 - alpha0)) the
/// t^(-alpha0) singularity is absorbed:
///
///   (k * q)(t) = t^(1-alpha0)/(1-alpha0) int_0^1 R(s) q(t - s) dy,  R(s) = s^alpha0 k(s).
inline double kernel_convolution(const SplitKernel& k, const std::function<double(double)>& q, double t) {
  if (!(t >= 0.0)) throw DomainError("kernel_convolution: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double a0 = k.alpha0();
  const double p = 1.0 / (1.0 - a0);
  const auto integrand = [&](double y) {
    const double s = t * std::pow(y, p);
    return k.kernel_regular_part(s) * q(t - s);
  };
  return std::pow(t, 1.0 - a0) / (1.0 - a0) * integrate_graded_left(integrand, 0.0, 1.0, 8, 0.25, gauss_legendre(32));
}

/// A separable target u(x, y, t) = X(x, y) tau(t).
struct SeparableTarget {
  /// X pointwise; when empty, `shape_coefficients` is used.
  SpatialFunction shape;
  std::vector<double> shape_coefficients;
  std::function<double(double)> tau;
  std::function<double(double)> tau_prime;
  std::function<double(double)> tau_second;
};

struct ManufacturedData {
  std::vector<double> shape_coefficients;  // c_m
  std::vector<double> initial;             // c_m tau(0)
  std::vector<ScalarForcing> forcing;      // f_m = c_m (tau' + lambda_m k * tau)
};

/// Forcing that makes X(x) tau(t) the exact solution:
///   f_m(t)  = c_m (tau'(t) + lambda_m (k * tau)(t)),
///   f_m'(t) = c_m (tau''(t) + lambda_m (k(t) tau(0) + (k * tau')(t))).
/// f_m' is infinite at t = 0 when tau(0) != 0.
inline ManufacturedData manufactured_forcing(const SpectralDomain& d, const SplitKernel& k, const SeparableTarget& target) {
  if (!target.tau || !target.tau_prime || !target.tau_second)
    throw InputError("manufactured_forcing: tau, tau' and tau'' are required");
  ManufacturedData out;
  if (target.shape) {
    const auto proj = detail::project_with(d, target.shape, gauss_legendre(16));
    out.shape_coefficients = project(d, target.shape);
    double captured = 0.0;
    for (double c : out.shape_coefficients) captured += c * c;
    const double tail = std::sqrt(std::max(0.0, proj.l2_squared - captured));
    if (tail > 1e-8 * std::max(1.0, std::sqrt(proj.l2_squared)))
      throw TruncationError("manufactured_forcing: spatial profile is not in the span of the retained modes", tail);
  } else {
    out.shape_coefficients = target.shape_coefficients;
    if (out.shape_coefficients.size() > d.modes())
      throw TruncationError("manufactured_forcing: more shape coefficients than retained modes", 0.0);
    out.shape_coefficients.resize(d.modes(), 0.0);
  }
  const double tau0 = target.tau(0.0);
  for (std::size_t m = 0; m < d.modes(); ++m) {
    const double c = out.shape_coefficients[m];
    const double lam = d.eigenvalues()[m];
    out.initial.push_back(c * tau0);
    if (c == 0.0) {
      out.forcing.push_back(ScalarForcing::zero());
      continue;
    }
    ScalarForcing f;
    f.value = [k, target, c, lam](double t) { return c * (target.tau_prime(t) + lam * kernel_convolution(k, target.tau, t)); };
    f.derivative = [k, target, c, lam, tau0](double t) {
      const double start = tau0 == 0.0 ? 0.0 : (t > 0.0 ? k.kernel(t) * tau0 : std::numeric_limits<double>::infinity());
      return c * (target.tau_second(t) + lam * (start + kernel_convolution(k, target.tau_prime, t)));
    };
    f.description = "manufactured";
    out.forcing.push_back(std::move(f));
  }
  return out;
}

namespace detail {

/// Uniform on [-1, 1] from the top 53 bits; independent of the standard
/// library's distribution implementations, so streams are portable.
inline double symmetric_uniform(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace detail

/// Problems with u0_m = lambda_m^(-5/2) xi_m and
/// f_m(t) = lambda_m^(-3/2) (a_m + b_m t + c_m sin(pi t / T)),
/// all coefficients uniform on [-1, 1] from a seeded generator.
inline std::vector<FieldProblem> random_field_family(const SpectralDomain& d, const SplitKernel& k, double horizon,
                                                     std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FieldProblem> out;
  const double w = std::numbers::pi / horizon;
  for (std::size_t p = 0; p < count; ++p) {
    std::vector<double> initial(d.modes());
    std::vector<ScalarForcing> forcing;
    for (std::size_t m = 0; m < d.modes(); ++m) {
      const double lam = d.eigenvalues()[m];
      initial[m] = std::pow(lam, -2.5) * detail::symmetric_uniform(rng);
      const double scale = std::pow(lam, -1.5);
      const double a = scale * detail::symmetric_uniform(rng);
      const double b = scale * detail::symmetric_uniform(rng);
      const double c = scale * detail::symmetric_uniform(rng);
      forcing.push_back({[a, b, c, w](double t) { return a + b * t + c * std::sin(w * t); },
                         [b, c, w](double t) { return b + c * w * std::cos(w * t); }, "random"});
    }
    out.emplace_back(d, k, horizon, std::move(initial), std::move(forcing));
  }
  return out;
}

}  // namespace vexmem
