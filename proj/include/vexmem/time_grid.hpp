#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "vexmem/error.hpp"

namespace vexmem {

/// Graded mesh t_n = T (n/N)^grading on [0, T]; grading = 1 is uniform.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t count, double grading = 1.0)
      : horizon_(horizon), grading_(grading), nodes_(count + 1) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("TimeGrid: horizon must be positive");
    if (count < 2) throw DomainError("TimeGrid: need at least two intervals");
    if (!(grading >= 1.0) || !std::isfinite(grading)) throw DomainError("TimeGrid: grading must be >= 1");
    const double n = static_cast<double>(count);
    for (std::size_t i = 0; i <= count; ++i) nodes_[i] = horizon * std::pow(static_cast<double>(i) / n, grading);
    nodes_.front() = 0.0;
    nodes_.back() = horizon;
  }

  double horizon() const noexcept { return horizon_; }
  double grading() const noexcept { return grading_; }
  /// Number of intervals N.
  std::size_t intervals() const noexcept { return nodes_.size() - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double operator[](std::size_t n) const { return nodes_[n]; }
  /// Length of the interval ending at node n (n >= 1).
  double step(std::size_t n) const { return nodes_[n] - nodes_[n - 1]; }

  /// Grid with twice as many intervals and the same grading; every node of this
  /// grid is node 2n of the refined one.
  TimeGrid refined() const { return TimeGrid(horizon_, 2 * intervals(), grading_); }

  /// Default grading 2/(1 - alpha0), capped at 4.
  static double default_grading(double alpha0) { return std::min(4.0, 2.0 / (1.0 - alpha0)); }

 private:
  double horizon_;
  double grading_;
  std::vector<double> nodes_;
};

/// Values of a function at the nodes of a TimeGrid.
using NodalValues = std::vector<double>;

}  // namespace vexmem
