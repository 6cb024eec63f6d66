#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oslalm {

enum class ErrorCategory {
  dimension,
  domain,
  convergence,
  config,
  io,
  data,
};

std::string_view to_string(ErrorCategory category);

/// Base error for the library. The category is what the CLI prints as the
/// machine-parseable prefix of its one-line failure message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Raised by iterative estimators that ran out of iterations. Carries the
/// last estimate so callers can decide whether it is good enough.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : Error(ErrorCategory::convergence, what), last_estimate_(last_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

[[noreturn]] void throw_dimension(const std::string& where, std::size_t expected,
                                  std::size_t actual);

}  // namespace oslalm
