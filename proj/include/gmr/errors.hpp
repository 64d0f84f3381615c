#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmr {

/// Invalid configuration value(s). Carries every problem found, not just the first.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> problems);
  explicit ConfigError(const std::string& problem)
      : ConfigError(std::vector<std::string>{problem}) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
  std::vector<std::string> problems_;
};

/// Caller passed mismatched shapes, NaNs or otherwise malformed arguments.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Specific volume became non-positive; `cell` is the flat cell index.
class EosDomainError : public std::runtime_error {
public:
  EosDomainError(const std::string& what, std::size_t cell)
      : std::runtime_error(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

private:
  std::size_t cell_;
};

/// A thermodynamic input lies outside its admissible interval.
class AdmissibilityError : public std::runtime_error {
public:
  AdmissibilityError(const std::string& what, std::size_t cell)
      : std::runtime_error(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

private:
  std::size_t cell_;
};

/// Numerical breakdown (indefinite operator, unsupported configuration, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A time step produced non-finite values. The state passed to the step is
/// left untouched and is the last valid one.
class IntegrationAborted : public NumericalError {
public:
  IntegrationAborted(const std::string& what, double t, int stage)
      : NumericalError(what), t_(t), stage_(stage) {}
  double time() const noexcept { return t_; }
  int stage() const noexcept { return stage_; }

private:
  double t_;
  int stage_;
};

}  // namespace gmr
