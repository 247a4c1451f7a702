#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "vexmem/error.hpp"
#include "vexmem/exponent.hpp"
#include "vexmem/quadrature.hpp"
#include "vexmem/special_functions.hpp"

namespace vexmem {

/// Riemann-Liouville kernel t^(mu-1) / Gamma(mu).
inline double beta_mu(double mu, double t) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("beta_mu: mu must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("beta_mu: t must be positive");
  if (mu == 1.0) return 1.0;
  return std::pow(t, mu - 1.0) / vexmem::gamma(mu);
}

/// The memory kernel k(t) = t^(-alpha(t)) / Gamma(1 - alpha(t)) split as
/// k = beta_{1-alpha0} + gtilde, where the remainder
///
///   gtilde(t) = int_0^t d/dz [ t^(-alpha(z)) / Gamma(1 - alpha(z)) ] dz
///             = int_0^t alpha'(z) t^(-alpha(z)) (psi(1 - alpha(z)) - ln t) / Gamma(1 - alpha(z)) dz
///
/// is bounded by C t^(1-alpha0) (1 + |ln t|). Immutable once built.
class SplitKernel {
 public:
  explicit SplitKernel(ExponentFunction exponent, double horizon = 1.0, std::size_t quad_nodes = 32,
                       double quad_tolerance = 1e-10)
      : exponent_(std::move(exponent)), horizon_(horizon), quad_nodes_(quad_nodes), quad_tolerance_(quad_tolerance) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("SplitKernel: horizon must be positive");
    if (horizon > exponent_.horizon() * (1.0 + 1e-12))
      throw DomainError("SplitKernel: horizon exceeds the range on which the exponent was validated");
    if (quad_nodes != 16 && quad_nodes != 32) throw DomainError("SplitKernel: quad_nodes must be 16 or 32");
    if (!(quad_tolerance > 0.0)) throw DomainError("SplitKernel: quad_tolerance must be positive");
    gamma_alpha0_ = vexmem::gamma(1.0 - exponent_.alpha0());
  }

  const ExponentFunction& exponent() const noexcept { return exponent_; }
  double horizon() const noexcept { return horizon_; }
  double alpha0() const noexcept { return exponent_.alpha0(); }
  std::size_t quad_nodes() const noexcept { return quad_nodes_; }
  double quad_tolerance() const noexcept { return quad_tolerance_; }
  bool has_perturbation() const noexcept { return !exponent_.is_constant(); }

  /// k(t) for t > 0.
  double kernel(double t) const {
    check_time(t, "kernel");
    const double a = exponent_.value(t);
    return std::pow(t, -a) / vexmem::gamma(1.0 - a);
  }

  /// k(t) t^alpha0 = t^(alpha0 - alpha(t)) / Gamma(1 - alpha(t)), bounded near t = 0.
  double kernel_regular_part(double t) const {
    if (t == 0.0) return 1.0 / gamma_alpha0_;
    check_time(t, "kernel_regular_part");
    const double a = exponent_.value(t);
    return std::exp((alpha0() - a) * std::log(t)) / vexmem::gamma(1.0 - a);
  }

  /// beta_{1-alpha0}(t).
  double beta_part(double t) const {
    check_time(t, "beta_part");
    return std::pow(t, -alpha0()) / gamma_alpha0_;
  }

  /// gtilde(t) by composite Gauss-Legendre quadrature in z with panels refined
  /// geometrically toward z = 0. Each panel is checked against a rule with half
  /// as many nodes and bisected where the two disagree.
  double gtilde(double t) const {
    check_time(t, "gtilde");
    if (!has_perturbation()) return 0.0;
    const double log_t = std::log(t);
    const auto integrand = [&](double z) { return perturbation_integrand(z, log_t); };
    double sum = 0.0;
    double err = 0.0;
    double right = t;
    for (std::size_t l = 0; l < panel_levels; ++l) {
      const double left = l + 1 < panel_levels ? right * panel_ratio : 0.0;
      sum += adaptive_panel(integrand, left, right, t, max_bisections, err);
      right = left;
    }
    if (!(err <= quad_tolerance_) || !std::isfinite(sum))
      throw AccuracyError("gtilde: quadrature did not reach tolerance at t=" + std::to_string(t), err);
    return sum;
  }

  /// gtilde(t) from a single 16-node panel, without an error check. Intended for
  /// bulk evaluation where the checked rule has been validated.
  double gtilde_unchecked(double t) const {
    if (!has_perturbation() || t <= 0.0) return 0.0;
    const double log_t = std::log(t);
    return gauss_legendre(16).integrate([&](double z) { return perturbation_integrand(z, log_t); }, 0.0, t);
  }

  /// d gtilde / dt = k'(t) - beta'_{1-alpha0}(t), analytically:
  /// k'(t) = k(t) (-alpha'(t) ln t - alpha(t)/t + alpha'(t) psi(1 - alpha(t))).
  double gtilde_prime(double t) const {
    check_time(t, "gtilde_prime");
    if (!has_perturbation()) return 0.0;
    return kernel_prime(t) - beta_part_prime(t);
  }

  double kernel_prime(double t) const {
    check_time(t, "kernel_prime");
    const double a = exponent_.value(t);
    const double da = exponent_.derivative(t);
    return kernel(t) * (-da * std::log(t) - a / t + da * vexmem::digamma(1.0 - a));
  }

  double beta_part_prime(double t) const {
    check_time(t, "beta_part_prime");
    return -alpha0() * std::pow(t, -alpha0() - 1.0) / gamma_alpha0_;
  }

 private:
  static constexpr std::size_t panel_levels = 3;
  static constexpr double panel_ratio = 0.25;
  static constexpr int max_bisections = 10;

  /// Integral over [lo, hi]; the tolerance is shared out in proportion to length
  /// over [0, t]. Accumulates the accepted error estimates into `err`.
  template <class F>
  double adaptive_panel(const F& f, double lo, double hi, double t, int depth, double& err) const {
    const double fine = gauss_legendre(quad_nodes_).integrate(f, lo, hi);
    const double coarse = gauss_legendre(quad_nodes_ / 2).integrate(f, lo, hi);
    const double e = std::abs(fine - coarse);
    if (e <= quad_tolerance_ * (hi - lo) / t || depth == 0) {
      err += e;
      return fine;
    }
    const double mid = 0.5 * (lo + hi);
    return adaptive_panel(f, lo, mid, t, depth - 1, err) + adaptive_panel(f, mid, hi, t, depth - 1, err);
  }

  /// z-integrand of gtilde at fixed t (passed as ln t).
  double perturbation_integrand(double z, double log_t) const {
    const double a = exponent_.value(z);
    const double da = exponent_.derivative(z);
    const double one_minus = 1.0 - a;
    return da * std::exp(-a * log_t) * (vexmem::digamma(one_minus) - log_t) / vexmem::gamma(one_minus);
  }

  void check_time(double t, const char* who) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be positive");
  }

  ExponentFunction exponent_;
  double horizon_;
  std::size_t quad_nodes_;
  double quad_tolerance_;
  double gamma_alpha0_ = 1.0;
};

}  // namespace vexmem
