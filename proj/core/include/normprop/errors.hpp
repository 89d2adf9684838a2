#ifndef NORMPROP_ERRORS_HPP_
#define NORMPROP_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace normprop {

enum class ErrorKind {
  domain,
  out_of_range,
  format,
  truncation,
  resolution,
  convergence,
  no_root,
  state,
  wrong_kernel,
  config,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. `kind()` lets callers
/// (the CLI in particular) map failures to exit codes without RTTI ladders.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define NORMPROP_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

NORMPROP_DEFINE_ERROR(DomainError, domain)
NORMPROP_DEFINE_ERROR(OutOfRangeError, out_of_range)
NORMPROP_DEFINE_ERROR(FormatError, format)
NORMPROP_DEFINE_ERROR(TruncationError, truncation)
NORMPROP_DEFINE_ERROR(ResolutionError, resolution)
NORMPROP_DEFINE_ERROR(StateError, state)
NORMPROP_DEFINE_ERROR(WrongKernelError, wrong_kernel)
NORMPROP_DEFINE_ERROR(ConfigError, config)
NORMPROP_DEFINE_ERROR(IoError, io)

#undef NORMPROP_DEFINE_ERROR

/// Iterative eigensolver ran out of restarts. Carries the worst residual seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::convergence, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Root bracketing failed; `searched_to` is the most negative exponent tried.
class NoRootError : public Error {
 public:
  NoRootError(const std::string& what, double searched_to)
      : Error(ErrorKind::no_root, what), searched_to_(searched_to) {}
  double searched_to() const noexcept { return searched_to_; }

 private:
  double searched_to_;
};

}  // namespace normprop

#endif  // NORMPROP_ERRORS_HPP_
