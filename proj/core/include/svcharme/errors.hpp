#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace svcharme {

/// Machine-readable category of a library failure.
enum class ErrorCode {
  non_stochastic_row,
  negative_entry,
  not_square,
  reducible_chain,
  periodic_chain,
  invalid_init,
  regime_out_of_range,
  invalid_parameter,
  fourth_moment_undefined,
  zero_x,
  grid_too_small,
  non_finite_value,
  quadrature_non_convergence,
  no_drift_region,
  insufficient_replications,
  degenerate_path,
  too_few_batches,
  config_error,
};

[[nodiscard]] const char* to_string(ErrorCode code) noexcept;

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Row and column accessors are 0-based; messages print 1-based positions.
class NonStochasticRow : public Error {
 public:
  NonStochasticRow(std::size_t row, double sum);
  [[nodiscard]] std::size_t row() const noexcept { return row_; }
  [[nodiscard]] double sum() const noexcept { return sum_; }

 private:
  std::size_t row_;
  double sum_;
};

class NegativeEntry : public Error {
 public:
  NegativeEntry(std::size_t row, std::size_t col);
  [[nodiscard]] std::size_t row() const noexcept { return row_; }
  [[nodiscard]] std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class QuadratureNonConvergence : public Error {
 public:
  QuadratureNonConvergence(double estimate, double error_bound);
  [[nodiscard]] double estimate() const noexcept { return estimate_; }
  [[nodiscard]] double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// Config parse failure with a location (line for syntax errors, JSON pointer
/// for field errors).
class ConfigError : public Error {
 public:
  ConfigError(std::string location, const std::string& message)
      : Error(ErrorCode::config_error, location + ": " + message), location_(std::move(location)) {}
  [[nodiscard]] const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace svcharme
