#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vexmem/error.hpp"
#include "vexmem/kernel.hpp"
#include "vexmem/quadrature.hpp"
#include "vexmem/time_grid.hpp"

namespace vexmem {

/// Antiderivatives K1 = 1*K and K2 = 1*1*K of a convolution kernel, both
/// vanishing at 0. Used on panels next to the kernel singularity.
struct KernelAntiderivatives {
  std::function<double(double)> first;
  std::function<double(double)> second;
};

/// Product-integration weights on a TimeGrid: for v piecewise linear between
/// the nodes,
///
///   (K * v)(t_n) = int_0^{t_n} K(t_n - s) v(s) ds = sum_{j <= n} W(n, j) v_j
///
/// exactly up to the quadrature used for the kernel moments. Row n has n + 1
/// entries; row 0 is the single weight 0.
class ConvolutionWeights {
 public:
  ConvolutionWeights() = default;

  /// Weights for a pointwise kernel. Panels far from the singularity at tau = 0
  /// use Gauss-Legendre; panels within four widths use the antiderivatives when
  /// given, otherwise a geometrically graded Gauss rule.
  static ConvolutionWeights build(const TimeGrid& grid, const std::function<double(double)>& kernel,
                                  const std::optional<KernelAntiderivatives>& anti = std::nullopt) {
    ConvolutionWeights w;
    const auto& t = grid.nodes();
    const std::size_t n_nodes = t.size();
    w.rows_.resize(n_nodes);
    w.rows_[0].assign(1, 0.0);
    const auto& g4 = gauss_legendre(4);
    const auto& g8 = gauss_legendre(8);
    const auto& g16 = gauss_legendre(16);
    for (std::size_t n = 1; n < n_nodes; ++n) {
      auto& row = w.rows_[n];
      row.assign(n + 1, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double a = t[n] - t[j + 1];  // tau range of panel j is [a, b]
        const double b = t[n] - t[j];
        const double h = b - a;
        double to_left = 0.0;   // coefficient of v_j, shape (tau - a)/h
        double to_right = 0.0;  // coefficient of v_{j+1}, shape (b - tau)/h
        auto accumulate = [&](const GaussLegendre& rule, double lo, double hi) {
          const double mid = 0.5 * (lo + hi);
          const double half = 0.5 * (hi - lo);
          const auto& x = rule.nodes();
          const auto& wt = rule.weights();
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = mid + half * x[q];
            const double kv = kernel(tau) * wt[q] * half;
            to_left += kv * (tau - a) / h;
            to_right += kv * (b - tau) / h;
          }
        };
        if (a >= 16.0 * h) {
          accumulate(g4, a, b);
        } else if (a >= 4.0 * h) {
          accumulate(g8, a, b);
        } else if (anti) {
          const double k1a = anti->first(a);
          const double moment0 = anti->first(b) - k1a;
          const double moment_b = anti->second(b) - anti->second(a) - h * k1a;  // int K (b - tau)
          to_right = moment_b / h;
          to_left = moment0 - to_right;
        } else if (a == 0.0) {
          // graded toward the kernel endpoint tau = 0
          double right = b;
          for (int level = 0; level < 12; ++level) {
            const double left = 0.25 * right;
            accumulate(g8, left, right);
            right = left;
          }
          accumulate(g8, 0.0, right);
        } else {
          accumulate(g16, a, b);
        }
        row[j] += to_left;
        row[j + 1] += to_right;
      }
    }
    return w;
  }

  /// Exact weights for beta_mu(tau) = tau^(mu-1)/Gamma(mu).
  static ConvolutionWeights beta(const TimeGrid& grid, double mu) {
    const double g = vexmem::gamma(mu);
    return build(
        grid, [mu, g](double tau) { return std::pow(tau, mu - 1.0) / g; },
        KernelAntiderivatives{[mu](double tau) { return tau > 0.0 ? std::pow(tau, mu) / vexmem::gamma(mu + 1.0) : 0.0; },
                              [mu](double tau) { return tau > 0.0 ? std::pow(tau, mu + 1.0) / vexmem::gamma(mu + 2.0) : 0.0; }});
  }

  static ConvolutionWeights zero(const TimeGrid& grid) {
    ConvolutionWeights w;
    w.rows_.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) w.rows_[n].assign(n + 1, 0.0);
    return w;
  }

  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<double>& row(std::size_t n) const { return rows_[n]; }
  double operator()(std::size_t n, std::size_t j) const { return rows_[n][j]; }

  /// sum_{j < n} W(n, j) v_j, the explicit part of row n.
  double history(std::size_t n, std::span<const double> v) const {
    const auto& r = rows_[n];
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += r[j] * v[j];
    return s;
  }

  /// (K * v) at every node.
  NodalValues apply(std::span<const double> v) const {
    if (v.size() != rows_.size()) throw InputError("ConvolutionWeights::apply: size mismatch");
    NodalValues out(rows_.size(), 0.0);
    for (std::size_t n = 0; n < rows_.size(); ++n) out[n] = history(n, v) + rows_[n][n] * v[n];
    return out;
  }

  ConvolutionWeights& operator+=(const ConvolutionWeights& other) {
    if (other.rows_.size() != rows_.size()) throw InputError("ConvolutionWeights: size mismatch");
    for (std::size_t n = 0; n < rows_.size(); ++n)
      for (std::size_t j = 0; j <= n; ++j) rows_[n][j] += other.rows_[n][j];
    return *this;
  }

 private:
  std::vector<std::vector<double>> rows_;
};

/// The two memory operators of the split kernel on one grid:
/// beta_{1-alpha0} * (.) and gtilde * (.). Independent of the eigenvalue, so one
/// instance serves every spectral mode.
struct MemoryWeights {
  ConvolutionWeights beta;
  ConvolutionWeights perturbation;

  static MemoryWeights build(const SplitKernel& kernel, const TimeGrid& grid) {
    MemoryWeights m;
    m.beta = ConvolutionWeights::beta(grid, 1.0 - kernel.alpha0());
    if (kernel.has_perturbation())
      m.perturbation = ConvolutionWeights::build(grid, [&kernel](double tau) { return kernel.gtilde_unchecked(tau); });
    else
      m.perturbation = ConvolutionWeights::zero(grid);
    return m;
  }
};

}  // namespace vexmem
