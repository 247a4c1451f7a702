#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "vexmem/error.hpp"

namespace vexmem {

/// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
class GaussLegendre {
 public:
  explicit GaussLegendre(std::size_t n) : nodes_(n), weights_(n) {
    if (n == 0) throw DomainError("GaussLegendre: need at least one node");
    if (n == 1) {
      nodes_[0] = 0.0;
      weights_[0] = 2.0;
      return;
    }
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes_[i] = -x;
      nodes_[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights_[i] = w;
      weights_[n - 1 - i] = w;
    }
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Integral of f over [a, b].
  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return sum * half;
  }

  /// Composite rule over equal cells.
  template <class F>
  double integrate_composite(F&& f, double a, double b, std::size_t cells) const {
    const double h = (b - a) / static_cast<double>(cells);
    double sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) sum += integrate(f, a + h * c, a + h * (c + 1));
    return sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared rules; construction is cheap but these are used in inner loops.
inline const GaussLegendre& gauss_legendre(std::size_t n) {
  static const GaussLegendre g4(4), g8(8), g16(16), g32(32);
  switch (n) {
    case 4: return g4;
    case 8: return g8;
    case 16: return g16;
    case 32: return g32;
    default: break;
  }
  throw DomainError("gauss_legendre: only 4, 8, 16 and 32 node rules are cached");
}

/// Composite Gauss rule on [a, b] with cells shrinking geometrically toward `a`
/// by `ratio` (the first cell is [a, a + (b-a) ratio^(levels-1)]).
template <class F>
double integrate_graded_left(F&& f, double a, double b, std::size_t levels, double ratio, const GaussLegendre& rule) {
  double sum = 0.0;
  double right = b;
  for (std::size_t l = 0; l + 1 < levels; ++l) {
    const double left = a + (right - a) * ratio;
    sum += rule.integrate(f, left, right);
    right = left;
  }
  return sum + rule.integrate(f, a, right);
}

}  // namespace vexmem
