#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "vexmem/error.hpp"
#include "vexmem/quadrature.hpp"

namespace vexmem {

/// The interval (0, L) or the rectangle (0, L1) x (0, L2) with homogeneous
/// Dirichlet conditions, truncated to the first `modes` eigenpairs of -Laplacian.
class SpectralDomain {
 public:
  SpectralDomain(std::vector<double> lengths, std::size_t modes) : lengths_(std::move(lengths)), modes_(modes) {
    if (lengths_.size() != 1 && lengths_.size() != 2) throw DomainError("SpectralDomain: dimension must be 1 or 2");
    for (double L : lengths_)
      if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("SpectralDomain: side lengths must be positive");
    if (modes_ == 0) throw DomainError("SpectralDomain: need at least one mode");
    build();
  }

  static SpectralDomain interval(double length, std::size_t modes) { return SpectralDomain({length}, modes); }
  static SpectralDomain rectangle(double lx, double ly, std::size_t modes) { return SpectralDomain({lx, ly}, modes); }

  std::size_t dimension() const noexcept { return lengths_.size(); }
  const std::vector<double>& lengths() const noexcept { return lengths_; }
  std::size_t modes() const noexcept { return modes_; }

  /// Sorted eigenvalues lambda_1 <= lambda_2 <= ...
  const std::vector<double>& eigenvalues() const noexcept { return lambda_; }
  /// Axis indices (i, j) of mode m; j = 0 in one dimension.
  const std::vector<std::array<int, 2>>& indices() const noexcept { return index_; }
  /// Largest retained index along each axis.
  std::array<int, 2> max_index() const noexcept { return max_index_; }

  /// phi_m(x, y); y is ignored in one dimension.
  double eigenfunction(std::size_t m, double x, double y = 0.0) const {
    const auto [i, j] = index_.at(m);
    double v = std::sqrt(2.0 / lengths_[0]) * std::sin(i * std::numbers::pi * x / lengths_[0]);
    if (dimension() == 2) v *= std::sqrt(2.0 / lengths_[1]) * std::sin(j * std::numbers::pi * y / lengths_[1]);
    return v;
  }

 private:
  void build() {
    const double pi = std::numbers::pi;
    const int n = static_cast<int>(modes_);
    std::vector<std::tuple<double, int, int>> all;
    if (dimension() == 1) {
      for (int i = 1; i <= n; ++i) all.emplace_back(std::pow(i * pi / lengths_[0], 2), i, 0);
    } else {
      // any of the first n pairs has both indices <= n
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          all.emplace_back(std::pow(i * pi / lengths_[0], 2) + std::pow(j * pi / lengths_[1], 2), i, j);
      std::sort(all.begin(), all.end());
      all.resize(modes_);
    }
    for (const auto& [lam, i, j] : all) {
      lambda_.push_back(lam);
      index_.push_back({i, j});
      max_index_[0] = std::max(max_index_[0], i);
      max_index_[1] = std::max(max_index_[1], j);
    }
  }

  std::vector<double> lengths_;
  std::size_t modes_;
  std::vector<double> lambda_;
  std::vector<std::array<int, 2>> index_;
  std::array<int, 2> max_index_{0, 0};
};

struct Eigenpair {
  double lambda;
  std::array<int, 2> index;
  std::function<double(double, double)> phi;
};

inline std::vector<Eigenpair> eigenpairs(const SpectralDomain& d) {
  std::vector<Eigenpair> out;
  for (std::size_t m = 0; m < d.modes(); ++m)
    out.push_back({d.eigenvalues()[m], d.indices()[m], [d, m](double x, double y) { return d.eigenfunction(m, x, y); }});
  return out;
}

using SpatialFunction = std::function<double(double x, double y)>;

namespace detail {

/// Tensor Gauss-Legendre points on one axis: `cells` equal cells of `rule`.
struct AxisQuadrature {
  std::vector<double> x;
  std::vector<double> w;
  AxisQuadrature(double length, std::size_t cells, const GaussLegendre& rule) {
    const double h = length / static_cast<double>(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      const double mid = (static_cast<double>(c) + 0.5) * h;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        x.push_back(mid + 0.5 * h * rule.nodes()[q]);
        w.push_back(0.5 * h * rule.weights()[q]);
      }
    }
  }
};

/// sin(i pi x / L) sqrt(2/L) at every quadrature point for i = 1..imax; row i-1.
inline std::vector<std::vector<double>> sine_table(const AxisQuadrature& q, double length, int imax) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(imax), std::vector<double>(q.x.size()));
  const double norm = std::sqrt(2.0 / length);
  for (int i = 1; i <= imax; ++i)
    for (std::size_t k = 0; k < q.x.size(); ++k)
      out[static_cast<std::size_t>(i - 1)][k] = norm * std::sin(i * std::numbers::pi * q.x[k] / length);
  return out;
}

struct Projection {
  std::vector<double> coefficients;
  double l2_squared = 0.0;  // ||v||^2 by the same quadrature
};

inline Projection project_with(const SpectralDomain& d, const SpatialFunction& v, const GaussLegendre& rule) {
  const auto& L = d.lengths();
  const auto imax = d.max_index();
  const std::size_t cells_x = 4 * static_cast<std::size_t>(d.dimension() == 1 ? d.modes() : imax[0]);
  const AxisQuadrature qx(L[0], cells_x, rule);
  const auto sx = sine_table(qx, L[0], imax[0]);
  Projection out;
  out.coefficients.assign(d.modes(), 0.0);
  if (d.dimension() == 1) {
    std::vector<double> fw(qx.x.size());
    for (std::size_t k = 0; k < qx.x.size(); ++k) {
      const double val = v(qx.x[k], 0.0);
      fw[k] = val * qx.w[k];
      out.l2_squared += val * val * qx.w[k];
    }
    for (std::size_t m = 0; m < d.modes(); ++m) {
      const auto& row = sx[static_cast<std::size_t>(d.indices()[m][0] - 1)];
      double s = 0.0;
      for (std::size_t k = 0; k < fw.size(); ++k) s += fw[k] * row[k];
      out.coefficients[m] = s;
    }
    return out;
  }
  const AxisQuadrature qy(L[1], 4 * static_cast<std::size_t>(imax[1]), rule);
  const auto sy = sine_table(qy, L[1], imax[1]);
  // partial sums over y for each retained j: P[j][kx] = sum_ky v w_y sin_j
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(imax[1]), std::vector<double>(qx.x.size(), 0.0));
  for (std::size_t kx = 0; kx < qx.x.size(); ++kx) {
    for (std::size_t ky = 0; ky < qy.x.size(); ++ky) {
      const double val = v(qx.x[kx], qy.x[ky]);
      out.l2_squared += val * val * qx.w[kx] * qy.w[ky];
      const double vw = val * qy.w[ky];
      for (int j = 0; j < imax[1]; ++j) partial[static_cast<std::size_t>(j)][kx] += vw * sy[static_cast<std::size_t>(j)][ky];
    }
  }
  for (std::size_t m = 0; m < d.modes(); ++m) {
    const auto [i, j] = d.indices()[m];
    const auto& row = sx[static_cast<std::size_t>(i - 1)];
    const auto& p = partial[static_cast<std::size_t>(j - 1)];
    double s = 0.0;
    for (std::size_t k = 0; k < qx.x.size(); ++k) s += qx.w[k] * row[k] * p[k];
    out.coefficients[m] = s;
  }
  return out;
}

}  // namespace detail

/// (v, phi_m) for the retained modes by composite Gauss-Legendre quadrature,
/// 16 nodes per cell and 4 cells per retained half-wave along each axis. The
/// result is compared with an 8-node rule on the same cells.
inline std::vector<double> project(const SpectralDomain& d, const SpatialFunction& v, double tolerance = 1e-10) {
  const auto fine = detail::project_with(d, v, gauss_legendre(16));
  const auto coarse = detail::project_with(d, v, gauss_legendre(8));
  double scale = 1.0;
  for (double c : fine.coefficients) scale = std::max(scale, std::abs(c));
  for (std::size_t m = 0; m < fine.coefficients.size(); ++m) {
    const double err = std::abs(fine.coefficients[m] - coarse.coefficients[m]);
    if (!std::isfinite(fine.coefficients[m]) || err > tolerance * scale)
      throw AccuracyError("project: coefficient " + std::to_string(m + 1) + " did not reach tolerance", err);
  }
  return fine.coefficients;
}

/// ||v||_{L2} by the projection quadrature.
inline double l2_norm(const SpectralDomain& d, const SpatialFunction& v) {
  return std::sqrt(detail::project_with(d, v, gauss_legendre(16)).l2_squared);
}

/// sqrt(sum lambda_m^s c_m^2).
inline double sobolev_norm(const SpectralDomain& d, std::span<const double> coeffs, double s) {
  if (coeffs.size() > d.modes()) throw DomainError("sobolev_norm: more coefficients than retained modes");
  if (!(s >= 0.0)) throw DomainError("sobolev_norm: s must be >= 0");
  double sum = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) sum += std::pow(d.eigenvalues()[m], s) * coeffs[m] * coeffs[m];
  return std::sqrt(sum);
}

}  // namespace vexmem
