#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vexmem/error.hpp"
#include "vexmem/exponent.hpp"

namespace vexmem {

/// A scalar time forcing f(t) together with its derivative f'(t).
struct ScalarForcing {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string description;

  double operator()(double t) const { return value(t); }

  static ScalarForcing zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, "zero"};
  }

  static ScalarForcing constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, "const:" + format(c)};
  }

  /// c0 + c1 t + c2 t^2 + ...
  static ScalarForcing polynomial(std::vector<double> c) {
    if (c.empty()) throw DomainError("ScalarForcing: empty polynomial");
    std::string desc = "poly:";
    for (std::size_t i = 0; i < c.size(); ++i) desc += (i ? "," : "") + format(c[i]);
    auto value = [c](double t) {
      double s = 0.0;
      for (std::size_t i = c.size(); i-- > 0;) s = s * t + c[i];
      return s;
    };
    auto derivative = [c](double t) {
      double s = 0.0;
      for (std::size_t i = c.size(); i-- > 1;) s = s * t + static_cast<double>(i) * c[i];
      return s;
    };
    return {value, derivative, desc};
  }

  /// a sin(w t)
  static ScalarForcing sine(double a, double w) {
    return {[a, w](double t) { return a * std::sin(w * t); }, [a, w](double t) { return a * w * std::cos(w * t); },
            "sin:" + format(a) + "," + format(w)};
  }

  /// a exp(-r t)
  static ScalarForcing exponential(double a, double r) {
    return {[a, r](double t) { return a * std::exp(-r * t); }, [a, r](double t) { return -a * r * std::exp(-r * t); },
            "exp:" + format(a) + "," + format(r)};
  }

  /// Parses "zero", "const:c", "poly:c0,c1,...", "sin:a,w" or "exp:a,r".
  static ScalarForcing parse(std::string_view spec) {
    if (spec == "zero") return zero();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("forcing: expected '<kind>:<numbers>', got '" + std::string(spec) + "'");
    const auto kind = spec.substr(0, colon);
    const auto nums = detail::parse_number_list(spec.substr(colon + 1), "forcing");
    if (kind == "const" && nums.size() == 1) return constant(nums[0]);
    if (kind == "poly" && !nums.empty()) return polynomial(nums);
    if (kind == "sin" && nums.size() == 2) return sine(nums[0], nums[1]);
    if (kind == "exp" && nums.size() == 2) return exponential(nums[0], nums[1]);
    throw ParseError("forcing: unknown kind or wrong number of parameters in '" + std::string(spec) + "'");
  }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

}  // namespace vexmem
