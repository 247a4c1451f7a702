#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vexmem/error.hpp"

namespace vexmem {

namespace detail {

inline std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError(std::string(what) + ": not a number: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || !std::isfinite(v)) throw ParseError(std::string(what) + ": not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Variable exponent alpha(t) with values in (0, 1) on [0, T].
///
/// Only representations with a bounded second derivative are offered:
/// constants, polynomials (affine is the degree-one case), and a Gaussian bump
/// alpha(t) = base + amplitude exp(-((t - center)/width)^2).
class ExponentFunction {
 public:
  enum class Kind { constant, affine, polynomial, bump };

  static ExponentFunction constant(double value, double horizon = 1.0) {
    return ExponentFunction(Kind::constant, {value}, horizon);
  }
  static ExponentFunction affine(double intercept, double slope, double horizon = 1.0) {
    return ExponentFunction(Kind::affine, {intercept, slope}, horizon);
  }
  static ExponentFunction polynomial(std::vector<double> coefficients, double horizon = 1.0) {
    if (coefficients.empty()) throw DomainError("ExponentFunction: empty polynomial");
    return ExponentFunction(Kind::polynomial, std::move(coefficients), horizon);
  }
  static ExponentFunction bump(double base, double amplitude, double center, double width, double horizon = 1.0) {
    if (!(width > 0.0)) throw DomainError("ExponentFunction: bump width must be positive");
    return ExponentFunction(Kind::bump, {base, amplitude, center, width}, horizon);
  }

  /// Parses "constant:0.5", "affine:0.3,0.1", "poly:c0,c1,..." or
  /// "bump:base,amplitude,center,width".
  static ExponentFunction parse(std::string_view spec, double horizon = 1.0) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("exponent: expected '<kind>:<numbers>', got '" + std::string(spec) + "'");
    const auto kind = spec.substr(0, colon);
    const auto nums = detail::parse_number_list(spec.substr(colon + 1), "exponent");
    try {
      if (kind == "constant" && nums.size() == 1) return constant(nums[0], horizon);
      if (kind == "affine" && nums.size() == 2) return affine(nums[0], nums[1], horizon);
      if (kind == "poly" && !nums.empty()) return polynomial(nums, horizon);
      if (kind == "bump" && nums.size() == 4) return bump(nums[0], nums[1], nums[2], nums[3], horizon);
    } catch (const DomainError& e) {
      throw ParseError(std::string("exponent rejected: ") + e.what());
    }
    throw ParseError("exponent: unknown kind or wrong number of parameters in '" + std::string(spec) + "'");
  }

  Kind kind() const noexcept { return kind_; }
  double horizon() const noexcept { return horizon_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  double operator()(double t) const { return value(t); }

  double value(double t) const {
    switch (kind_) {
      case Kind::constant: return params_[0];
      case Kind::affine:
      case Kind::polynomial: {
        double s = 0.0;
        for (std::size_t i = params_.size(); i-- > 0;) s = s * t + params_[i];
        return s;
      }
      case Kind::bump: {
        const double u = (t - params_[2]) / params_[3];
        return params_[0] + params_[1] * std::exp(-u * u);
      }
    }
    return 0.0;
  }

  double derivative(double t) const {
    switch (kind_) {
      case Kind::constant: return 0.0;
      case Kind::affine:
      case Kind::polynomial: {
        double s = 0.0;
        for (std::size_t i = params_.size(); i-- > 1;) s = s * t + static_cast<double>(i) * params_[i];
        return s;
      }
      case Kind::bump: {
        const double u = (t - params_[2]) / params_[3];
        return -2.0 * u / params_[3] * params_[1] * std::exp(-u * u);
      }
    }
    return 0.0;
  }

  double second_derivative(double t) const {
    switch (kind_) {
      case Kind::constant: return 0.0;
      case Kind::affine:
      case Kind::polynomial: {
        double s = 0.0;
        for (std::size_t i = params_.size(); i-- > 2;) s = s * t + static_cast<double>(i * (i - 1)) * params_[i];
        return s;
      }
      case Kind::bump: {
        const double u = (t - params_[2]) / params_[3];
        const double w2 = params_[3] * params_[3];
        return params_[1] * std::exp(-u * u) * (4.0 * u * u - 2.0) / w2;
      }
    }
    return 0.0;
  }

  /// alpha(0), fixed at construction.
  double alpha0() const noexcept { return alpha0_; }

  /// True when alpha' vanishes identically.
  bool is_constant() const noexcept {
    switch (kind_) {
      case Kind::constant: return true;
      case Kind::affine:
      case Kind::polynomial:
        for (std::size_t i = 1; i < params_.size(); ++i)
          if (params_[i] != 0.0) return false;
        return true;
      case Kind::bump: return params_[1] == 0.0;
    }
    return false;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::constant: os << "constant:"; break;
      case Kind::affine: os << "affine:"; break;
      case Kind::polynomial: os << "poly:"; break;
      case Kind::bump: os << "bump:"; break;
    }
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
    return os.str();
  }

 private:
  ExponentFunction(Kind kind, std::vector<double> params, double horizon)
      : kind_(kind), params_(std::move(params)), horizon_(horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("ExponentFunction: horizon must be positive");
    for (double p : params_)
      if (!std::isfinite(p)) throw DomainError("ExponentFunction: non-finite parameter");
    alpha0_ = value(0.0);
    constexpr std::size_t samples = 4096;
    for (std::size_t i = 0; i <= samples; ++i) {
      const double t = horizon * static_cast<double>(i) / samples;
      const double a = value(t);
      if (!(a > 0.0 && a < 1.0))
        throw DomainError("ExponentFunction: alpha(" + std::to_string(t) + ") = " + std::to_string(a) + " leaves (0, 1)");
    }
  }

  Kind kind_;
  std::vector<double> params_;
  double horizon_;
  double alpha0_ = 0.0;
};

}  // namespace vexmem
