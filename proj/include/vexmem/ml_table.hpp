#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "vexmem/error.hpp"
#include "vexmem/special_functions.hpp"

namespace vexmem {

/// Piecewise Chebyshev interpolant of x -> E_{alpha,beta}(-x) on [0, x_max].
///
/// E_{alpha,beta} is entire, so on every panel the interpolant converges
/// geometrically. Panels start dyadic ([0,1], [1,2], [2,4], ...) and are bisected
/// until the interpolant reproduces direct evaluations between the nodes.
/// Used wherever the same Mittag-Leffler function is needed at many points.
class MittagLefflerTable {
 public:
  static constexpr std::size_t degree = 24;

  MittagLefflerTable(const MLParams& params, double x_max, double tolerance = 1e-13)
      : params_(params), x_max_(x_max) {
    params_.validate();
    if (!(x_max >= 0.0) || !std::isfinite(x_max)) throw DomainError("MittagLefflerTable: x_max must be finite and >= 0");
    if (x_max == 0.0) {
      constant_ = mittag_leffler(params_, 0.0);
      return;
    }
    double a = 0.0;
    double b = std::min(1.0, x_max);
    while (true) {
      build(a, b, tolerance, 0);
      if (b >= x_max) break;
      a = b;
      b = std::min(2.0 * b, x_max);
    }
  }

  const MLParams& params() const noexcept { return params_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t panel_count() const noexcept { return lower_.size(); }

  /// E_{alpha,beta}(-x) for x in [0, x_max].
  double operator()(double x) const {
    if (lower_.empty()) return constant_;
    if (x < 0.0 || x > x_max_ * (1.0 + 1e-14)) throw DomainError("MittagLefflerTable: argument outside the tabulated range");
    auto it = std::upper_bound(lower_.begin(), lower_.end(), x);
    const std::size_t i = (it == lower_.begin()) ? 0 : static_cast<std::size_t>(it - lower_.begin()) - 1;
    return clenshaw(i, x);
  }

 private:
  void build(double a, double b, double tolerance, int depth) {
    std::vector<double> samples(degree);
    for (std::size_t j = 0; j < degree; ++j) samples[j] = mittag_leffler(params_, -node(a, b, j));
    std::vector<double> coeffs(degree, 0.0);
    for (std::size_t k = 0; k < degree; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < degree; ++j)
        s += samples[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) / degree);
      coeffs[k] = 2.0 * s / degree;
    }
    coeffs[0] *= 0.5;

    double scale = 0.0;
    for (double v : samples) scale = std::max(scale, std::abs(v));
    const std::size_t index = lower_.size();
    lower_.push_back(a);
    upper_.push_back(b);
    coeffs_.push_back(coeffs);

    // probe between the nodes
    double worst = 0.0;
    for (double t : {-0.93, -0.61, -0.17, 0.29, 0.71, 0.97}) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * t;
      worst = std::max(worst, std::abs(clenshaw(index, x) - mittag_leffler(params_, -x)));
    }
    if (worst <= tolerance * std::max(scale, 1e-300)) return;
    if (depth >= 40) throw AccuracyError("MittagLefflerTable: interpolation did not converge", worst / std::max(scale, 1e-300));
    lower_.pop_back();
    upper_.pop_back();
    coeffs_.pop_back();
    const double mid = 0.5 * (a + b);
    build(a, mid, tolerance, depth + 1);
    build(mid, b, tolerance, depth + 1);
  }

  static double node(double a, double b, std::size_t j) {
    return 0.5 * (a + b) + 0.5 * (b - a) * std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / degree);
  }

  double clenshaw(std::size_t panel, double x) const {
    const double a = lower_[panel];
    const double b = upper_[panel];
    const double t = (2.0 * x - a - b) / (b - a);
    const auto& c = coeffs_[panel];
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = degree - 1; k > 0; --k) {
      const double b0 = 2.0 * t * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + c[0];
  }

  MLParams params_;
  double x_max_;
  double constant_ = 0.0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::vector<double>> coeffs_;
};

}  // namespace vexmem
