#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svcharme/model.hpp"
#include "svcharme/simulator.hpp"

namespace svcharme {

/// E[V(Z_t) | Z_{t-1} = (e_l, x)] for V(z) = 1 + x^2:
/// 1 + sum_k a_lk (m_k^2 + sigma_k^2 + kappa A_k^2 + 2 m_k A_k).
[[nodiscard]] double conditional_v_expectation(const ModelSpec& spec, Regime l, double x);

/// (E[V | e_l, x] - V(x)) / V(x).
[[nodiscard]] double relative_drift(const ModelSpec& spec, Regime l, double x);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo average of 1 + X_t^2 over `samples` independent one-step
/// draws from (e_l, x). Requires samples >= 10^4.
[[nodiscard]] McEstimate mc_v_expectation(const ModelSpec& spec, Regime l, double x, std::size_t samples,
                                          std::uint64_t seed);

struct DriftConstantsRow {
  double x = 0.0;
  /// relative_drift for each l = 1..K.
  std::vector<double> relative_drift;
};

struct DriftConstants {
  double L = 0.0;
  double beta = 0.0;
  double slack = 0.05;
  std::vector<DriftConstantsRow> rows;
};

inline constexpr double kBetaSlack = 0.05;

/// beta is the far-tail drift margin shrunk by 5%; L is the largest grid
/// magnitude still violating the inequality (the smallest grid magnitude when
/// none does). Throws Error(no_drift_region) when the drift check fails or no
/// grid point drifts inward.
[[nodiscard]] DriftConstants estimate_drift_constants(const ModelSpec& spec,
                                                      const MagnitudeGrid& grid = MagnitudeGrid::decades(-1.0, 4.0, 4),
                                                      double margin = kDriftMargin);

/// sup_x |F_a(x) - F_b(x)| for two sorted samples.
[[nodiscard]] double kolmogorov_distance(std::span<const double> a_sorted, std::span<const double> b_sorted);

struct DistanceDecayOptions {
  /// Fixed starting values; ignored when stationary_start is set.
  std::vector<double> x0_list{50.0};
  /// Draw each replication's (Q_1, X_1) from the reference sample.
  bool stationary_start = false;
  std::size_t max_lag = 40;
  std::size_t replications = 2000;
  std::size_t burn_in = 100'000;
  std::size_t reference_length = 1'000'000;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
};

struct AutocovFit {
  double rate = 0.0;
  double r_squared = 0.0;
  bool informative = false;
  std::size_t lags_used = 0;
  std::vector<double> autocorrelation;
};

struct McseRow {
  std::size_t n = 0;
  double mean = 0.0;
  double mcse = 0.0;
  /// mcse * sqrt(n).
  double scaled = 0.0;
};

struct ConvergenceReport {
  std::vector<std::size_t> lags;
  /// Max over starting points of the Kolmogorov distance at each lag.
  std::vector<double> distances;
  std::vector<std::vector<double>> distances_by_start;
  std::vector<bool> informative;
  double noise_floor = 0.0;
  bool already_stationary = false;
  std::optional<double> fitted_log_c;
  std::optional<double> fitted_rho;
  std::optional<double> fit_r_squared;
  /// Distance between the two halves of the reference sample; stationary
  /// when below noise_floor.
  double reference_half_distance = 0.0;
  bool reference_stationary = false;
  std::optional<AutocovFit> autocov;
  std::vector<McseRow> mcse_table;
};

/// Kolmogorov distance between the lag-t marginal of R replications from each
/// start and a long burned-in reference run, for t = 0..max_lag. Fits
/// log d = log C + t log rho over the leading run of lags above the noise
/// floor 2/sqrt(R). Throws Error(insufficient_replications) when that run
/// holds a single lag; a run of zero lags marks the start already
/// stationary.
[[nodiscard]] ConvergenceReport distance_decay(const ModelSpec& spec, const DistanceDecayOptions& options);

/// Fits |autocovariance(t)| ~ c r^t over the leading lags whose
/// autocorrelation clears 2/sqrt(n). Requires values.size() >= 100 max_lag.
/// Throws Error(degenerate_path) for (near) zero variance.
[[nodiscard]] AutocovFit autocov_decay(std::span<const double> values, std::size_t max_lag);

struct BatchMeans {
  double mean = 0.0;
  double mcse = 0.0;
  std::size_t batch_size = 0;
  std::size_t used = 0;
};

/// Batch-means Monte Carlo standard error of the sample mean. Uses the first
/// n_batches * floor(n / n_batches) values. Throws Error(too_few_batches)
/// below 20 batches or when a batch would be empty.
[[nodiscard]] BatchMeans batch_means_mcse(std::span<const double> values, std::size_t n_batches);

struct DiagnoseOptions {
  MagnitudeGrid drift_grid = MagnitudeGrid::decades(-1.0, 4.0, 4);
  double margin = kDriftMargin;
  DistanceDecayOptions decay;
  std::size_t autocov_max_lag = 20;
  std::vector<std::size_t> mcse_lengths{100'000, 200'000, 400'000, 800'000};
  std::size_t batches = 50;
};

struct DiagnosticsReport {
  DriftConstants drift;
  ConvergenceReport convergence;
  std::vector<std::string> notes;
};

/// Drift constants, distance decay, autocovariance decay and batch-means MCSE
/// on one long burned-in path.
[[nodiscard]] DiagnosticsReport run_diagnostics(const ModelSpec& spec, const DiagnoseOptions& options);

}  // namespace svcharme
