#include "svcharme/errors.hpp"

#include <sstream>

namespace svcharme {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::non_stochastic_row: return "NonStochasticRow";
    case ErrorCode::negative_entry: return "NegativeEntry";
    case ErrorCode::not_square: return "NotSquare";
    case ErrorCode::reducible_chain: return "ReducibleChain";
    case ErrorCode::periodic_chain: return "PeriodicChain";
    case ErrorCode::invalid_init: return "InvalidInit";
    case ErrorCode::regime_out_of_range: return "RegimeOutOfRange";
    case ErrorCode::invalid_parameter: return "InvalidParameter";
    case ErrorCode::fourth_moment_undefined: return "FourthMomentUndefined";
    case ErrorCode::zero_x: return "ZeroX";
    case ErrorCode::grid_too_small: return "GridTooSmall";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::quadrature_non_convergence: return "QuadratureNonConvergence";
    case ErrorCode::no_drift_region: return "NoDriftRegion";
    case ErrorCode::insufficient_replications: return "InsufficientReplications";
    case ErrorCode::degenerate_path: return "DegeneratePath";
    case ErrorCode::too_few_batches: return "TooFewBatches";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string describe_row(std::size_t row, double sum) {
  std::ostringstream os;
  os.precision(17);
  os << "row " << row + 1 << " sums to " << sum;
  return os.str();
}

std::string describe_quadrature(double estimate, double bound) {
  std::ostringstream os;
  os.precision(10);
  os << "estimate " << estimate << " with error bound " << bound;
  return os.str();
}

}  // namespace

NonStochasticRow::NonStochasticRow(std::size_t row, double sum)
    : Error(ErrorCode::non_stochastic_row, describe_row(row, sum)), row_(row), sum_(sum) {}

NegativeEntry::NegativeEntry(std::size_t row, std::size_t col)
    : Error(ErrorCode::negative_entry,
            "entry (" + std::to_string(row + 1) + ", " + std::to_string(col + 1) + ") is negative"),
      row_(row),
      col_(col) {}

QuadratureNonConvergence::QuadratureNonConvergence(double estimate, double error_bound)
    : Error(ErrorCode::quadrature_non_convergence, describe_quadrature(estimate, error_bound)),
      estimate_(estimate),
      error_bound_(error_bound) {}

}  // namespace svcharme
