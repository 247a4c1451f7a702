#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vexmem/error.hpp"

namespace vexmem {

namespace detail {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

/// Lanczos sum and shifted base for Gamma(x) with x >= 0.5.
inline double lanczos_series(double x) {
  const double xm1 = x - 1.0;
  double a = lanczos_coefficients[0];
  for (std::size_t i = 1; i < lanczos_coefficients.size(); ++i) a += lanczos_coefficients[i] / (xm1 + static_cast<double>(i));
  return a;
}

inline double gamma_positive(double x) {
  if (x < 0.5) return gamma_positive(x + 1.0) / x;
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double t = x - 0.5 + lanczos_g;
  // t^(x-1/2) e^-t split in two factors to delay overflow
  const double p = std::pow(t, 0.5 * (x - 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * p * (p * std::exp(-t)) * lanczos_series(x);
}

inline double log_gamma_positive(double x) {
  if (x < 0.5) return log_gamma_positive(x + 1.0) - std::log(x);
  const double t = x - 0.5 + lanczos_g;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t + std::log(lanczos_series(x));
}

/// sin(pi y) with argument reduction done before the multiplication by pi.
inline double sin_pi(double y) {
  double r = std::remainder(y, 2.0);  // in [-1, 1]
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

/// 1 / Gamma(y) for any real y; zero at the non-positive integers.
inline double reciprocal_gamma(double y) {
  if (y > 0.0) {
    if (y < 170.0) return 1.0 / gamma_positive(y);
    return std::exp(-log_gamma_positive(y));
  }
  // reflection: 1/Gamma(y) = sin(pi y) Gamma(1-y) / pi
  const double s = sin_pi(y);
  if (s == 0.0) return 0.0;
  const double w = 1.0 - y;
  if (w < 170.0) return s * gamma_positive(w) / std::numbers::pi;
  return s * std::exp(log_gamma_positive(w)) / std::numbers::pi;
}

}  // namespace detail

/// Gamma function for x > 0.
inline double gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma: argument must be positive and finite");
  return detail::gamma_positive(x);
}

inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: argument must be positive and finite");
  return detail::log_gamma_positive(x);
}

/// psi(x) = Gamma'(x)/Gamma(x) for x > 0: upward recurrence to x >= 10, then the
/// Stirling-type asymptotic series.
inline double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("digamma: argument must be positive and finite");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B_{2k} / (2k) coefficients
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
  double eval_tolerance = 1e-12;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("MLParams: alpha must lie in (0, 2]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("MLParams: beta must be positive");
    if (!(eval_tolerance > 0.0)) throw DomainError("MLParams: eval_tolerance must be positive");
  }
};

namespace ml {

/// Value of one evaluation regime together with an absolute error estimate and a
/// magnitude scale (sum of absolute contributions) used for relative checks.
struct Evaluation {
  double value = 0.0;
  double error = 0.0;
  double scale = 0.0;
};

enum class Regime { series, contour, asymptotic };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::series: return "series";
    case Regime::contour: return "contour";
    case Regime::asymptotic: return "asymptotic";
  }
  return "unknown";
}

/// |z| beyond which the asymptotic expansion is used. The smallest asymptotic
/// term decays like exp(-|z|^(1/alpha)), so 50^alpha leaves it far below
/// double precision.
inline double asymptotic_threshold(double alpha) { return std::max(2.0, std::pow(50.0, alpha)); }

inline Regime select_regime(double alpha, double z) {
  const double x = std::abs(z);
  if (x <= 1.0) return Regime::series;
  if (x < asymptotic_threshold(alpha)) return Regime::contour;
  return Regime::asymptotic;
}

/// Taylor series sum z^k / Gamma(alpha k + beta) with Neumaier-compensated accumulation.
inline Evaluation series(const MLParams& p, double z) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double sum = 0.0;
  double comp = 0.0;
  double abs_sum = 0.0;
  const double logx = (z == 0.0) ? 0.0 : std::log(std::abs(z));
  double last = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double arg = p.alpha * k + p.beta;
    double mag;
    if (k == 0) {
      mag = detail::reciprocal_gamma(arg);
    } else if (z == 0.0) {
      last = 0.0;
      break;
    } else {
      mag = std::exp(k * logx - detail::log_gamma_positive(arg));
    }
    const double term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
    const double t = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    abs_sum += mag;
    last = mag;
    // beyond the Gamma minimum the terms decrease monotonically when |z| <= 1
    if (arg > 2.0 && mag <= 0.25 * eps * std::abs(sum + comp)) break;
  }
  const double value = sum + comp;
  return {value, last + 4.0 * eps * (std::abs(value) + eps * abs_sum), abs_sum};
}

namespace detail {

struct ContourGeometry {
  double angle;           // ray angle theta in (pi/2, pi]
  bool include_residues;  // poles at +-pi/alpha lie between the Bromwich line and the rays
};

inline ContourGeometry contour_geometry(double alpha) {
  constexpr double pi = std::numbers::pi;
  const double angle_a = std::min(pi, 0.5 * (0.5 * pi + pi / alpha));
  const double gap_a = std::abs(pi - alpha * angle_a);
  if (alpha > 1.0) {
    const double gap_b = pi * (alpha - 1.0);
    if (gap_b >= gap_a) return {pi, true};
  }
  return {angle_a, false};
}

/// Sum of the residues (1/alpha) s^(1-beta) e^s over the conjugate pole pair
/// s = x^(1/alpha) e^(+-i pi/alpha), alpha in (1, 2].
inline double pole_pair(double alpha, double beta, double x) {
  const double r = std::pow(x, 1.0 / alpha);
  const double phase = std::numbers::pi / alpha;
  return (2.0 / alpha) * std::pow(r, 1.0 - beta) * std::exp(r * std::cos(phase)) *
         std::cos((1.0 - beta) * phase + r * std::sin(phase));
}

}  // namespace detail

/// Inverse-Laplace (Hankel contour) representation for z < 0:
/// E(z) = (1/2 pi i) int_H e^s s^(alpha-beta) / (s^alpha - z) ds [+ pole residues].
/// The contour is two rays at angle +-theta joined by an arc of radius 1/2, with
/// theta placed as far as possible from the poles of the integrand.
inline Evaluation contour(const MLParams& p, double z) {
  if (!(z < 0.0)) throw DomainError("ml::contour: requires z < 0");
  using boost::math::quadrature::gauss_kronrod;
  const double x = -z;
  const double a = p.alpha;
  const double b = p.beta;
  const auto geo = detail::contour_geometry(a);
  const double theta = geo.angle;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double rho = 0.5;

  // Im[e^s s^(a-b) e^(i theta) / (s^a + x)] / pi along s = r e^(i theta)
  auto ray = [&](double r) {
    const double mag = std::exp(r * ct) * std::pow(r, a - b);
    const double ph = r * st + (a - b) * theta + theta;
    const double ra = std::pow(r, a);
    const double dre = ra * std::cos(a * theta) + x;
    const double dim = ra * std::sin(a * theta);
    const double nre = mag * std::cos(ph);
    const double nim = mag * std::sin(ph);
    return (nim * dre - nre * dim) / ((dre * dre + dim * dim) * std::numbers::pi);
  };
  // Re[e^s s^(a-b) rho e^(i phi) / (s^a + x)] / pi along s = rho e^(i phi)
  auto arc = [&](double phi) {
    const double mag = std::exp(rho * std::cos(phi)) * std::pow(rho, a - b + 1.0);
    const double ph = rho * std::sin(phi) + (a - b + 1.0) * phi;
    const double ra = std::pow(rho, a);
    const double dre = ra * std::cos(a * phi) + x;
    const double dim = ra * std::sin(a * phi);
    const double nre = mag * std::cos(ph);
    const double nim = mag * std::sin(ph);
    return (nre * dre + nim * dim) / ((dre * dre + dim * dim) * std::numbers::pi);
  };

  const double tol = std::min(1e-14, 0.01 * p.eval_tolerance);
  const double upper = (45.0 + 3.0 * std::abs(a - b)) / std::abs(ct);
  const double peak = std::pow(x, 1.0 / a);

  struct Piece {
    bool on_arc;
    double lo;
    double hi;
  };
  std::vector<Piece> pieces{{true, 0.0, theta}};
  if (peak > rho && peak < upper) {
    pieces.push_back({false, rho, peak});
    pieces.push_back({false, peak, upper});
  } else {
    pieces.push_back({false, rho, upper});
  }

  // A coarse pass fixes the global magnitude so that pieces whose integrand
  // nearly vanishes are not refined down to rounding noise.
  std::vector<double> coarse_l1(pieces.size());
  double global = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    double err = 0.0;
    const auto& pc = pieces[i];
    if (pc.on_arc)
      gauss_kronrod<double, 31>::integrate(arc, pc.lo, pc.hi, 0, 0.0, &err, &coarse_l1[i]);
    else
      gauss_kronrod<double, 31>::integrate(ray, pc.lo, pc.hi, 0, 0.0, &err, &coarse_l1[i]);
    global += coarse_l1[i];
  }

  double value = 0.0;
  double error = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& pc = pieces[i];
    const double rel = std::max(tol, tol * global / std::max(coarse_l1[i], std::numeric_limits<double>::min()));
    double err = 0.0;
    double l1 = 0.0;
    if (pc.on_arc)
      value += gauss_kronrod<double, 31>::integrate(arc, pc.lo, pc.hi, 15, rel, &err, &l1);
    else
      value += gauss_kronrod<double, 31>::integrate(ray, pc.lo, pc.hi, 15, rel, &err, &l1);
    error += err;
    scale += l1;
  }
  if (geo.include_residues) {
    const double res = detail::pole_pair(a, b, x);
    value += res;
    scale += std::abs(res);
  }
  error += 8.0 * std::numeric_limits<double>::epsilon() * scale;
  return {value, error, scale};
}

/// Asymptotic expansion for large negative z:
/// E(-x) ~ [pole terms] + sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(beta - alpha k),
/// truncated at the smallest term.
inline Evaluation asymptotic(const MLParams& p, double z) {
  if (!(z < 0.0)) throw DomainError("ml::asymptotic: requires z < 0");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double x = -z;
  const double a = p.alpha;
  const double b = p.beta;
  double exp_part = 0.0;
  if (a > 1.0) {
    exp_part = detail::pole_pair(a, b, x);
  } else if (a == 1.0 && b == std::round(b)) {
    // single real pole at s = -x
    const double m = 1.0 - b;
    exp_part = std::pow(-x, m) * std::exp(-x);
  }

  const double logx = std::log(x);
  double sum = 0.0;
  double comp = 0.0;
  double abs_sum = 0.0;
  // the envelope x^-k Gamma(alpha k + 1 - beta) / pi is smallest near k = x^(1/alpha) / alpha
  const int k_opt = static_cast<int>(std::clamp(std::pow(x, 1.0 / a) / a, 1.0, 4000.0));
  double omitted = 0.0;
  for (int k = 1; k <= k_opt + 1; ++k) {
    const double arg = b - a * k;
    const double envelope =
        std::exp(-k * logx + ((arg <= 0.0) ? vexmem::detail::log_gamma_positive(1.0 - arg) - std::log(std::numbers::pi)
                                           : -vexmem::detail::log_gamma_positive(arg)));
    omitted = envelope;
    if (k > k_opt) break;
    const double term = ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-k * logx) * vexmem::detail::reciprocal_gamma(arg);
    const double t = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    abs_sum += std::abs(term);
    if (arg < 0.0 && envelope <= 0.25 * eps * std::abs(sum + comp + exp_part)) {
      omitted = 0.0;
      break;
    }
  }
  const double value = exp_part + sum + comp;
  return {value, omitted + 4.0 * eps * (std::abs(value) + eps * abs_sum), abs_sum + std::abs(exp_part)};
}

}  // namespace ml

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z <= 0.
inline double mittag_leffler(const MLParams& p, double z) {
  p.validate();
  if (!(z <= 0.0) || !std::isfinite(z)) throw DomainError("mittag_leffler: argument must be finite and <= 0");
  // Elementary reductions of alpha = 1. The integral representations lose all
  // relative accuracy there because the algebraic part vanishes identically.
  if (p.alpha == 1.0 && std::abs(z) > 1.0) {
    if (p.beta == 1.0) return std::exp(z);
    if (p.beta == 2.0) return std::expm1(z) / z;
  }
  ml::Evaluation e;
  switch (ml::select_regime(p.alpha, z)) {
    case ml::Regime::series: e = ml::series(p, z); break;
    case ml::Regime::contour: e = ml::contour(p, z); break;
    case ml::Regime::asymptotic: e = ml::asymptotic(p, z); break;
  }
  // near a real zero of E only absolute accuracy relative to the integrand scale is meaningful
  const double reference = std::max(std::abs(e.value), 1e-2 * e.scale);
  // and no evaluation beats the rounding floor of its own terms
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * e.scale;
  if (!std::isfinite(e.value) || e.error > std::max(p.eval_tolerance * reference, floor)) {
    throw AccuracyError("mittag_leffler: tolerance not reached at alpha=" + std::to_string(p.alpha) +
                            ", beta=" + std::to_string(p.beta) + ", z=" + std::to_string(z),
                        e.error / std::max(reference, std::numeric_limits<double>::min()));
  }
  return e.value;
}

/// x E_{alpha,2}(-x) for x >= 0, the memory-weighted factor that stays bounded in x.
inline double ml_kernel_weighted(const MLParams& p, double x) {
  if (p.beta != 2.0) throw DomainError("ml_kernel_weighted: requires beta = 2");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("ml_kernel_weighted: argument must be finite and >= 0");
  if (x == 0.0) return 0.0;
  return x * mittag_leffler(p, -x);
}

}  // namespace vexmem
