#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace vexmem {

/// Broad failure categories. The CLI maps each to a process exit status.
enum class ErrorCategory {
  domain,        // argument outside the mathematical domain of an operation
  input,         // malformed or non-finite user data
  parse,         // unreadable configuration
  accuracy,      // an evaluation could not reach its tolerance
  convergence,   // an iteration did not converge
  resolution,    // grid too coarse for the requested estimate
  truncation,    // data not representable in the retained modes
  invariant,     // a verified property did not hold
  io,
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::input: return "input";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::accuracy: return "accuracy";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::resolution: return "resolution";
    case ErrorCategory::truncation: return "truncation";
    case ErrorCategory::invariant: return "invariant";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

namespace detail {

/// Short scientific rendering for error messages; std::to_string prints tiny
/// estimates as 0.000000.
inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCategory::parse, what) {}
};

/// Carries the best error estimate that was reached.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(ErrorCategory::accuracy, what + " (achieved error estimate " + detail::short_number(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Carries the last fixed-point update size.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorCategory::convergence, what + " (last residual " + detail::short_number(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& what) : Error(ErrorCategory::resolution, what) {}
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double tail) : Error(ErrorCategory::truncation, what), tail_(tail) {}

  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorCategory::invariant, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

/// Mode-level failure surfaced by the field solver with the failing mode index.
class ModeError : public Error {
 public:
  ModeError(std::size_t mode, const Error& cause)
      : Error(cause.category(), "mode " + std::to_string(mode) + ": " + cause.what()), mode_(mode) {}

  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_;
};

}  // namespace vexmem
