#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vexmem/convolution.hpp"
#include "vexmem/error.hpp"
#include "vexmem/forcing.hpp"
#include "vexmem/kernel.hpp"
#include "vexmem/ml_table.hpp"
#include "vexmem/special_functions.hpp"
#include "vexmem/time_grid.hpp"

namespace vexmem {

/// One spectral mode: u' + lambda (k * u) = f on (0, T], u(0) = u0.
struct ModeProblem {
  ModeProblem(SplitKernel kernel_, double lambda_, double u0_, ScalarForcing forcing_ = ScalarForcing::zero())
      : kernel(std::move(kernel_)), lambda(lambda_), u0(u0_), forcing(std::move(forcing_)) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("ModeProblem: lambda must be finite and >= 0");
    if (!std::isfinite(u0)) throw DomainError("ModeProblem: u0 must be finite");
    if (!forcing.value || !forcing.derivative) throw InputError("ModeProblem: forcing and its derivative are required");
  }

  SplitKernel kernel;
  double lambda;
  double u0;
  ScalarForcing forcing;
};

struct ModeSolution {
  TimeGrid grid;
  NodalValues values;
  NodalValues derivative;
  std::size_t iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline NodalValues sample(const std::function<double(double)>& f, const TimeGrid& g, const char* what) {
  NodalValues out(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    out[n] = f(g[n]);
    if (!std::isfinite(out[n]))
      throw InputError(std::string(what) + " is not finite at t=" + std::to_string(g[n]));
  }
  return out;
}

inline void check_grid(const ModeProblem& p, const TimeGrid& g) {
  if (g.horizon() > p.kernel.horizon() * (1.0 + 1e-12))
    throw DomainError("grid horizon exceeds the kernel horizon");
}

}  // namespace detail

/// Implicit product-integration solve of u' + lambda (k * u) = f.
///
/// The equation is integrated over each step: u_n - u_{n-1} + lambda int C = int f
/// with C(t) = (k * u)(t) trapezoidal in time and u piecewise linear inside the
/// convolution. The forcing integral uses the end-corrected trapezoid
/// h/2 (f_{n-1} + f_n) + h^2/12 (f'_{n-1} - f'_n).
inline ModeSolution volterra_oracle_solve(const ModeProblem& p, const TimeGrid& g, const MemoryWeights& w) {
  detail::check_grid(p, g);
  if (w.beta.size() != g.size()) throw InputError("volterra_oracle_solve: weights built for another grid");
  const NodalValues f = detail::sample(p.forcing.value, g, "forcing");
  // f' may be singular at t = 0 (e.g. manufactured data); the end correction
  // is then dropped on the first step
  NodalValues df(g.size(), 0.0);
  for (std::size_t n = 1; n < g.size(); ++n) df[n] = p.forcing.derivative(g[n]);
  const double df0 = p.forcing.derivative(0.0);
  const bool corrected_start = std::isfinite(df0);
  if (corrected_start) df[0] = df0;
  for (std::size_t n = 1; n < g.size(); ++n)
    if (!std::isfinite(df[n])) throw InputError("forcing derivative is not finite at t=" + std::to_string(g[n]));
  const std::size_t size = g.size();
  NodalValues u(size, 0.0);
  NodalValues conv(size, 0.0);  // (k * u)(t_n)
  u[0] = p.u0;
  const double lam = p.lambda;
  for (std::size_t n = 1; n < size; ++n) {
    const double h = g.step(n);
    const double history = w.beta.history(n, u) + w.perturbation.history(n, u);
    const double diag = w.beta(n, n) + w.perturbation(n, n);
    double forcing = 0.5 * h * (f[n - 1] + f[n]);
    if (n > 1 || corrected_start) forcing += h * h / 12.0 * (df[n - 1] - df[n]);
    u[n] = (u[n - 1] + forcing - 0.5 * lam * h * (conv[n - 1] + history)) / (1.0 + 0.5 * lam * h * diag);
    conv[n] = history + diag * u[n];
  }
  NodalValues du(size);
  for (std::size_t n = 0; n < size; ++n) du[n] = f[n] - lam * conv[n];
  return ModeSolution{g, std::move(u), std::move(du), 0, 0.0};
}

inline ModeSolution volterra_oracle_solve(const ModeProblem& p, const TimeGrid& g) {
  return volterra_oracle_solve(p, g, MemoryWeights::build(p.kernel, g));
}

/// ||v||_{X,sigma} = ||exp(-sigma t) v'||_{L2(0,T)} with v' replaced by forward
/// difference quotients, constant on each interval; the weight exp(-2 sigma t)
/// is integrated exactly over each interval.
inline double weighted_norm(std::span<const double> v, const TimeGrid& g, double sigma) {
  if (v.size() != g.size()) throw InputError("weighted_norm: size mismatch");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("weighted_norm: sigma must be finite and >= 0");
  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const double h = g[n + 1] - g[n];
    const double q = (v[n + 1] - v[n]) / h;
    const double weight =
        sigma == 0.0 ? h : std::exp(-2.0 * sigma * g[n]) * (-std::expm1(-2.0 * sigma * h)) / (2.0 * sigma);
    sum += weight * q * q;
  }
  return std::sqrt(sum);
}

/// The operators of the fixed-point reformulation on one grid.
///
/// With a = 2 - alpha0 and e(t) = E_{a,1}(-lambda t^a), u = u0 e + v where
///
///   v = e * (F - lambda gtilde * v),
///
/// and the mapping v -> e * (F - lambda gtilde * v) is a contraction in the
/// sigma-weighted norm for sigma large. Convolution with e uses product
/// integration with the antiderivatives t E_{a,2}(-lambda t^a) and
/// t^2 E_{a,3}(-lambda t^a).
class PicardOperator {
 public:
  PicardOperator(const ModeProblem& p, const TimeGrid& g, std::shared_ptr<const MemoryWeights> memory = nullptr)
      : grid_(g), lambda_(p.lambda), u0_(p.u0), order_(2.0 - p.kernel.alpha0()),
        perturbed_(p.kernel.has_perturbation()) {
    detail::check_grid(p, g);
    memory_ = memory ? std::move(memory) : std::make_shared<MemoryWeights>(MemoryWeights::build(p.kernel, g));
    if (memory_->beta.size() != g.size()) throw InputError("PicardOperator: weights built for another grid");
    const double a = order_;
    const double lam = lambda_;
    const double x_max = lam * std::pow(g.horizon(), a);
    const MittagLefflerTable e1({a, 1.0}, x_max);
    const MittagLefflerTable e2({a, 2.0}, x_max);
    const MittagLefflerTable e3({a, 3.0}, x_max);
    const MittagLefflerTable ea({a, a}, x_max);
    auto arg = [a, lam, x_max](double t) { return std::min(lam * std::pow(t, a), x_max); };
    resolvent_ = ConvolutionWeights::build(
        g, [&](double t) { return e1(arg(t)); },
        KernelAntiderivatives{[&](double t) { return t > 0.0 ? t * e2(arg(t)) : 0.0; },
                              [&](double t) { return t > 0.0 ? t * t * e3(arg(t)) : 0.0; }});
    e_.resize(g.size());
    de_.resize(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double t = g[n];
      e_[n] = e1(arg(t));
      de_[n] = t > 0.0 ? -lam * std::pow(t, a - 1.0) * ea(arg(t)) : 0.0;
    }
    forcing_ = detail::sample(p.forcing.value, g, "forcing");
    // F = f - lambda u0 (gtilde * e): the memory perturbation acting on u0 e
    corrected_forcing_ = forcing_;
    if (lam != 0.0 && u0_ != 0.0) {
      const NodalValues ge = memory_->perturbation.apply(e_);
      for (std::size_t n = 0; n < g.size(); ++n) corrected_forcing_[n] -= lam * u0_ * ge[n];
    }
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  double order() const noexcept { return order_; }
  const MemoryWeights& memory() const noexcept { return *memory_; }
  const ConvolutionWeights& resolvent() const noexcept { return resolvent_; }
  /// e(t_n) and e'(t_n).
  const NodalValues& homogeneous() const noexcept { return e_; }
  const NodalValues& homogeneous_derivative() const noexcept { return de_; }
  const NodalValues& forcing() const noexcept { return forcing_; }
  const NodalValues& corrected_forcing() const noexcept { return corrected_forcing_; }

  /// e * (source - lambda gtilde * v)
  NodalValues apply(std::span<const double> source, std::span<const double> v) const {
    NodalValues rhs(source.begin(), source.end());
    if (lambda_ != 0.0 && has_memory_perturbation()) {
      const NodalValues gv = memory_->perturbation.apply(v);
      for (std::size_t n = 0; n < rhs.size(); ++n) rhs[n] -= lambda_ * gv[n];
    }
    return resolvent_.apply(rhs);
  }

  /// The linear part -e * (lambda gtilde * v).
  NodalValues apply_homogeneous(std::span<const double> v) const {
    return apply(NodalValues(v.size(), 0.0), v);
  }

  /// u = u0 e + v and u' = u0 e' + v', with v' = F - lambda gtilde * v - lambda beta * v.
  ModeSolution assemble(NodalValues v, std::size_t iterations, double residual) const {
    const std::size_t size = grid_.size();
    const NodalValues gv = memory_->perturbation.apply(v);
    const NodalValues bv = memory_->beta.apply(v);
    NodalValues u(size), du(size);
    for (std::size_t n = 0; n < size; ++n) {
      u[n] = u0_ * e_[n] + v[n];
      du[n] = u0_ * de_[n] + corrected_forcing_[n] - lambda_ * (gv[n] + bv[n]);
    }
    u[0] = u0_;
    return ModeSolution{grid_, std::move(u), std::move(du), iterations, residual};
  }

  bool has_memory_perturbation() const noexcept { return perturbed_; }

 private:
  TimeGrid grid_;
  double lambda_;
  double u0_;
  double order_;
  bool perturbed_;
  std::shared_ptr<const MemoryWeights> memory_;
  ConvolutionWeights resolvent_;
  NodalValues e_;
  NodalValues de_;
  NodalValues forcing_;
  NodalValues corrected_forcing_;
};

/// w = E_{a,1}(-lambda t^a) * (f - lambda gtilde * v), both convolutions by
/// product integration on the grid.
inline NodalValues apply_picard_map(const ModeProblem& p, const TimeGrid& g, std::span<const double> v) {
  if (v.size() != g.size()) throw InputError("apply_picard_map: size mismatch");
  if (v[0] != 0.0) throw InputError("apply_picard_map: v(0) must be 0");
  const PicardOperator op(p, g);
  return op.apply(op.forcing(), v);
}

/// Banach iteration for v from v = 0; stops at the first m with
/// ||v^{m+1} - v^m||_{X,sigma} <= tol and reports m as the iteration count.
inline ModeSolution picard_solve(const PicardOperator& op, double sigma, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw DomainError("picard_solve: tol must be positive");
  const TimeGrid& g = op.grid();
  NodalValues v(g.size(), 0.0);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m <= max_iter; ++m) {
    NodalValues next = op.apply(op.corrected_forcing(), v);
    NodalValues diff(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) diff[n] = next[n] - v[n];
    residual = weighted_norm(diff, g, sigma);
    v = std::move(next);
    if (!std::isfinite(residual)) break;
    if (residual <= tol) return op.assemble(std::move(v), m, residual);
  }
  throw ConvergenceError("picard_solve: no convergence within " + std::to_string(max_iter) +
                             " iterations at sigma=" + std::to_string(sigma),
                         residual);
}

inline ModeSolution picard_solve(const ModeProblem& p, const TimeGrid& g, double sigma, double tol = 1e-10,
                                 std::size_t max_iter = 50) {
  return picard_solve(PicardOperator(p, g), sigma, tol, max_iter);
}

struct ContractionReport {
  std::vector<double> sigma;
  std::vector<double> factor;
  /// d log(factor) / d log(sigma) between the two largest sigma values; NaN when
  /// either factor is zero.
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;

  bool strictly_decreasing() const {
    for (std::size_t i = 1; i < factor.size(); ++i)
      if (!(factor[i] < factor[i - 1])) return false;
    return true;
  }
  bool trivial() const {
    return std::all_of(factor.begin(), factor.end(), [](double f) { return f == 0.0; });
  }
};

/// Probe directions e_v: smooth functions of t vanishing at 0.
inline std::vector<NodalValues> probe_basket(const TimeGrid& g) {
  const double T = g.horizon();
  const double pi = std::numbers::pi;
  const std::vector<std::function<double(double)>> shapes = {
      [](double t) { return t; },
      [](double t) { return t * t; },
      [=](double t) { return std::sin(pi * t / T); },
      [=](double t) { return 1.0 - std::cos(pi * t / T); },
      [](double t) { return t * std::exp(-t); },
  };
  std::vector<NodalValues> out;
  for (const auto& s : shapes) out.push_back(detail::sample(s, g, "probe"));
  return out;
}

/// Largest ratio ||e_w||_{X,sigma} / ||e_v||_{X,sigma} over the probe basket,
/// where e_w = -e * (lambda gtilde * e_v).
inline ContractionReport contraction_probe(const PicardOperator& op, const std::vector<double>& sigma_list) {
  if (sigma_list.size() < 2) throw DomainError("contraction_probe: need at least two sigma values");
  const TimeGrid& g = op.grid();
  const auto basket = probe_basket(g);
  std::vector<NodalValues> images;
  for (const auto& ev : basket) images.push_back(op.apply_homogeneous(ev));
  ContractionReport report;
  for (double sigma : sigma_list) {
    double worst = 0.0;
    for (std::size_t i = 0; i < basket.size(); ++i) {
      const double denom = weighted_norm(basket[i], g, sigma);
      if (!(denom > 0.0) || !std::isfinite(denom)) {
        report.warnings.push_back("probe " + std::to_string(i) + " has zero norm at sigma=" + std::to_string(sigma) + "; skipped");
        continue;
      }
      worst = std::max(worst, weighted_norm(images[i], g, sigma) / denom);
    }
    report.sigma.push_back(sigma);
    report.factor.push_back(worst);
  }
  const std::size_t k = report.sigma.size();
  const double f1 = report.factor[k - 2];
  const double f2 = report.factor[k - 1];
  if (f1 > 0.0 && f2 > 0.0)
    report.slope = std::log(f2 / f1) / std::log(report.sigma[k - 1] / report.sigma[k - 2]);
  return report;
}

inline ContractionReport contraction_probe(const ModeProblem& p, const TimeGrid& g, const std::vector<double>& sigma_list) {
  return contraction_probe(PicardOperator(p, g), sigma_list);
}

/// Smallest sigma in {1, 10, 100, ...} whose probed contraction factor is below 0.5.
inline double select_sigma(const PicardOperator& op, double max_sigma = 1e8) {
  for (double sigma = 1.0; sigma <= max_sigma; sigma *= 10.0) {
    const auto r = contraction_probe(op, {sigma, 10.0 * sigma});
    if (r.factor[0] < 0.5) return sigma;
  }
  throw ConvergenceError("select_sigma: no sigma up to " + std::to_string(max_sigma) + " gives a contraction factor below 0.5",
                         std::numeric_limits<double>::quiet_NaN());
}

/// Three-point second difference at interior node n.
inline double second_difference(std::span<const double> u, const TimeGrid& g, std::size_t n) {
  const double h1 = g[n] - g[n - 1];
  const double h2 = g[n + 1] - g[n];
  return 2.0 * ((u[n + 1] - u[n]) / h2 - (u[n] - u[n - 1]) / h1) / (h1 + h2);
}

struct SingularityEstimate {
  double limit = 0.0;
  double predicted = 0.0;
  /// The node indices and raw samples t_n^alpha0 u''(t_n) that were extrapolated.
  std::vector<std::size_t> nodes;
  std::vector<double> samples;
};

/// Estimates lim t^alpha0 u''(t) as t -> 0 from the discrete solution. Samples
/// at nodes m, 2m, 4m near the origin are extrapolated in 1/n^2.
inline SingularityEstimate singularity_probe(const ModeProblem& p, const ModeSolution& s) {
  const TimeGrid& g = s.grid;
  const double T = g.horizon();
  std::size_t below = 0;
  while (below < g.size() && g[below] < T / 100.0) ++below;
  if (below < 8) throw ResolutionError("singularity_probe: fewer than 8 nodes below T/100; refine or grade the grid");
  const double a0 = p.kernel.alpha0();
  // the three sample nodes sit well inside the initial layer
  std::size_t top = 0;
  while (top + 1 < g.size() && g[top + 1] <= 1e-4 * T) ++top;
  top = std::min(top, below - 1);
  std::size_t m = std::max<std::size_t>(top / 4, 1);
  if (4 * m + 1 >= g.size()) throw ResolutionError("singularity_probe: grid too coarse near t = 0");
  SingularityEstimate est;
  for (std::size_t n : {m, 2 * m, 4 * m}) {
    est.nodes.push_back(n);
    est.samples.push_back(std::pow(g[n], a0) * second_difference(s.values, g, n));
  }
  const double r1 = (4.0 * est.samples[1] - est.samples[0]) / 3.0;
  const double r2 = (4.0 * est.samples[2] - est.samples[1]) / 3.0;
  est.limit = (16.0 * r2 - r1) / 15.0;
  est.predicted = -p.lambda * p.u0 / vexmem::gamma(1.0 - a0);
  return est;
}

inline SingularityEstimate singularity_probe(const ModeProblem& p, const TimeGrid& g) {
  return singularity_probe(p, volterra_oracle_solve(p, g));
}

}  // namespace vexmem
