#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semispec {

/// Broad failure category. The CLI maps each category to an exit code.
enum class ErrorKind {
  Config,     // bad input: syntax, malformed config, violated preconditions
  Regime,     // the potential/domain violates the hypotheses of the asymptotic regime
  Numerical,  // instability, infeasible resolution, singular factorization, underflow
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  virtual const char* type_name() const noexcept { return "error"; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
  const char* type_name() const noexcept override { return "config"; }
};

class ParseError : public ConfigError {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : ConfigError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }
  const char* type_name() const noexcept override { return "parse"; }

 private:
  std::size_t offset_;
};

class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what) : Error(ErrorKind::Regime, what) {}
  const char* type_name() const noexcept override { return "regime"; }
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
  const char* type_name() const noexcept override { return "numerical"; }
};

class InfeasibleResolution : public NumericalError {
 public:
  InfeasibleResolution(const std::string& what, double smallest_feasible_h)
      : NumericalError(what), smallest_h_(smallest_feasible_h) {}
  double smallest_feasible_h() const noexcept { return smallest_h_; }
  const char* type_name() const noexcept override { return "infeasible_resolution"; }

 private:
  double smallest_h_;
};

class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* type_name() const noexcept override { return "instability"; }
};

/// z coincides with an eigenvalue (singular shifted matrix).
class SingularShift : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* type_name() const noexcept override { return "singular_shift"; }
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 1;
    case ErrorKind::Regime: return 2;
    case ErrorKind::Numerical: return 3;
  }
  return 1;
}

}  // namespace semispec
