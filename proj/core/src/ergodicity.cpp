#include "svcharme/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "svcharme/errors.hpp"
#include "svcharme/parallel.hpp"

namespace svcharme {

namespace {

// Seed-tree indices under the master seed.
constexpr std::uint64_t kReferenceStream = 0;
constexpr std::uint64_t kLongPathStream = 1;
constexpr std::uint64_t kStartStreamBase = 16;
// Index under a replication seed for drawing its initial state; 0..2 belong
// to the StreamSet.

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

double conditional_v_expectation(const ModelSpec& spec, Regime l, double x) {
  return 1.0 + drift_numerator(spec, l, x);
}

double relative_drift(const ModelSpec& spec, Regime l, double x) {
  const double v = 1.0 + x * x;
  return (conditional_v_expectation(spec, l, x) - v) / v;
}

McEstimate mc_v_expectation(const ModelSpec& spec, Regime l, double x, std::size_t samples, std::uint64_t seed) {
  if (samples < 10'000) throw Error(ErrorCode::invalid_parameter, "Monte Carlo oracle needs at least 10^4 samples");
  (void)spec.regime(l);
  SimulationState state(spec, seed);
  // Welford running moments.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double next = step(spec, l, x, state).x;
    const double v = 1.0 + next * next;
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double variance = m2 / static_cast<double>(samples - 1);
  return McEstimate{mean, std::sqrt(variance / static_cast<double>(samples))};
}

DriftConstants estimate_drift_constants(const ModelSpec& spec, const MagnitudeGrid& grid, double margin) {
  const DriftReport check = check_assumption8(spec, grid, margin);
  if (!check.pass) {
    throw Error(ErrorCode::no_drift_region, "drift limsup " + std::to_string(check.max_limsup) + " is not below 1");
  }
  const std::vector<double>& magnitudes = check.grid;
  const std::size_t k = spec.size();
  const double far_decade = magnitudes.back() / 10.0;

  DriftConstants out;
  out.slack = kBetaSlack;
  double worst_far = -std::numeric_limits<double>::infinity();
  for (const double magnitude : magnitudes) {
    for (const double x : {-magnitude, magnitude}) {
      DriftConstantsRow row{x, std::vector<double>(k)};
      for (std::size_t l = 0; l < k; ++l) {
        row.relative_drift[l] = relative_drift(spec, Regime(l + 1), x);
        if (magnitude >= far_decade * (1.0 - 1e-12)) worst_far = std::max(worst_far, row.relative_drift[l]);
      }
      out.rows.push_back(std::move(row));
    }
  }
  if (!(worst_far < 0.0)) {
    throw Error(ErrorCode::no_drift_region, "no grid point in the far decade drifts inward");
  }
  out.beta = (1.0 - kBetaSlack) * -worst_far;
  out.L = magnitudes.front();
  for (const DriftConstantsRow& row : out.rows) {
    const double worst = *std::max_element(row.relative_drift.begin(), row.relative_drift.end());
    if (worst > -out.beta) out.L = std::max(out.L, std::abs(row.x));
  }
  return out;
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return 1.0;
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double value = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= value) ++i;
    while (j < b.size() && b[j] <= value) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

ConvergenceReport distance_decay(const ModelSpec& spec, const DistanceDecayOptions& options) {
  if (options.replications < 2) throw Error(ErrorCode::insufficient_replications, "need at least 2 replications");
  if (options.reference_length < 2) throw Error(ErrorCode::invalid_parameter, "reference run too short");
  const std::vector<double> pi = stationary_distribution(spec.transition()).probabilities;

  // Reference stationary sample: one long run after burn-in.
  const std::uint64_t reference_seed = derive_seed(options.master_seed, kReferenceStream);
  const Path reference = simulate_path(spec, stationary_initial_regime(pi, reference_seed), 0.0,
                                       options.burn_in + options.reference_length, reference_seed);
  if (reference.diverged) throw Error(ErrorCode::non_finite_value, "reference run diverged");
  const std::span<const double> reference_values(reference.values.data() + options.burn_in,
                                                 options.reference_length);
  const std::span<const Regime> reference_regimes(reference.regimes.states.data() + options.burn_in,
                                                  options.reference_length);
  std::vector<double> reference_sorted(reference_values.begin(), reference_values.end());
  std::sort(reference_sorted.begin(), reference_sorted.end());

  ConvergenceReport report;
  {
    const std::size_t half = options.reference_length / 2;
    std::vector<double> first(reference_values.begin(), reference_values.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<double> second(reference_values.begin() + static_cast<std::ptrdiff_t>(half), reference_values.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    report.reference_half_distance = kolmogorov_distance(first, second);
  }

  const std::size_t starts = options.stationary_start ? 1 : options.x0_list.size();
  if (starts == 0) throw Error(ErrorCode::invalid_parameter, "no starting points given");
  const std::size_t lags = options.max_lag + 1;
  const std::size_t reps = options.replications;
  report.noise_floor = 2.0 / std::sqrt(static_cast<double>(reps));
  // The reference only has to be stationary to the precision the ensemble resolves.
  report.reference_stationary = report.reference_half_distance < report.noise_floor;
  report.lags.resize(lags);
  std::iota(report.lags.begin(), report.lags.end(), std::size_t{0});
  report.distances.assign(lags, 0.0);
  report.distances_by_start.assign(starts, std::vector<double>(lags, 0.0));

  for (std::size_t s = 0; s < starts; ++s) {
    const std::uint64_t start_seed = derive_seed(options.master_seed, kStartStreamBase + s);
    // samples[t * reps + r] is X at lag t in replication r.
    std::vector<double> samples(lags * reps);
    parallel_for(reps, options.threads, [&](std::size_t r) {
      const std::uint64_t seed = replication_seed(start_seed, r);
      Regime regime;
      double x0 = 0.0;
      if (options.stationary_start) {
        Engine engine(derive_seed(seed, kInitialStateStream));
        const std::size_t index = engine() % reference_values.size();
        regime = reference_regimes[index];
        x0 = reference_values[index];
      } else {
        regime = stationary_initial_regime(pi, seed);
        x0 = options.x0_list[s];
      }
      const Path path = simulate_path(spec, regime, x0, lags, seed);
      for (std::size_t t = 0; t < lags; ++t) {
        if (t < path.size()) {
          samples[t * reps + r] = path.values[t];
        } else {
          const double last = path.values.back();
          samples[t * reps + r] = std::copysign(std::numeric_limits<double>::infinity(), last);
        }
      }
    });
    parallel_for(lags, options.threads, [&](std::size_t t) {
      const auto first = samples.begin() + static_cast<std::ptrdiff_t>(t * reps);
      std::sort(first, first + static_cast<std::ptrdiff_t>(reps));
      report.distances_by_start[s][t] =
          kolmogorov_distance(std::span<const double>(&*first, reps), reference_sorted);
    });
  }
  for (std::size_t t = 0; t < lags; ++t) {
    for (std::size_t s = 0; s < starts; ++s) {
      report.distances[t] = std::max(report.distances[t], report.distances_by_start[s][t]);
    }
  }

  report.informative.assign(lags, false);
  std::size_t run = 0;
  while (run < lags && report.distances[run] > report.noise_floor) {
    report.informative[run] = true;
    ++run;
  }
  if (run == 0) {
    report.already_stationary = true;
    return report;
  }
  if (run == 1) {
    throw Error(ErrorCode::insufficient_replications,
                "only lag 0 clears the noise floor; increase replications or use a slower-mixing start");
  }
  std::vector<double> ts(run);
  std::vector<double> logs(run);
  for (std::size_t t = 0; t < run; ++t) {
    ts[t] = static_cast<double>(t);
    logs[t] = std::log(report.distances[t]);
  }
  const LineFit fit = least_squares(ts, logs);
  report.fitted_log_c = fit.intercept;
  report.fitted_rho = std::exp(fit.slope);
  report.fit_r_squared = fit.r_squared;
  return report;
}

AutocovFit autocov_decay(std::span<const double> values, std::size_t max_lag) {
  if (max_lag == 0 || values.size() < 100 * max_lag) {
    throw Error(ErrorCode::invalid_parameter, "autocovariance fit needs at least 100 * max_lag values");
  }
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double gamma0 = 0.0;
  for (const double v : values) gamma0 += (v - mean) * (v - mean);
  gamma0 /= n;
  if (!(gamma0 > 1e-15 * std::max(1.0, mean * mean))) {
    throw Error(ErrorCode::degenerate_path, "sample variance is numerically zero");
  }

  AutocovFit fit;
  fit.autocorrelation.resize(max_lag + 1);
  fit.autocorrelation[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t t = lag; t < values.size(); ++t) acc += (values[t] - mean) * (values[t - lag] - mean);
    fit.autocorrelation[lag] = acc / n / gamma0;
  }

  const double floor = 2.0 / std::sqrt(n);
  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t lag = 1; lag <= max_lag && std::abs(fit.autocorrelation[lag]) > floor; ++lag) {
    ts.push_back(static_cast<double>(lag));
    logs.push_back(std::log(std::abs(fit.autocorrelation[lag]) * gamma0));
  }
  fit.lags_used = ts.size();
  if (ts.empty()) return fit;
  fit.informative = true;
  if (ts.size() == 1) {
    fit.rate = std::abs(fit.autocorrelation[1]);
    fit.r_squared = 1.0;
    return fit;
  }
  const LineFit line = least_squares(ts, logs);
  fit.rate = std::exp(line.slope);
  fit.r_squared = line.r_squared;
  return fit;
}

BatchMeans batch_means_mcse(std::span<const double> values, std::size_t n_batches) {
  if (n_batches < 20) throw Error(ErrorCode::too_few_batches, "batch means needs at least 20 batches");
  const std::size_t size = values.size() / n_batches;
  if (size == 0) throw Error(ErrorCode::too_few_batches, "fewer values than batches");

  std::vector<double> means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(b * size);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) / static_cast<double>(size);
  }
  // Deviations from the first batch keep identical batches exactly zero.
  double shift_mean = 0.0;
  for (const double m : means) shift_mean += m - means[0];
  shift_mean /= static_cast<double>(n_batches);
  double ss = 0.0;
  for (const double m : means) ss += (m - means[0] - shift_mean) * (m - means[0] - shift_mean);

  BatchMeans out;
  out.batch_size = size;
  out.used = size * n_batches;
  out.mean = means[0] + shift_mean;
  const auto b = static_cast<double>(n_batches);
  out.mcse = std::sqrt(ss / (b * (b - 1.0)));
  return out;
}

DiagnosticsReport run_diagnostics(const ModelSpec& spec, const DiagnoseOptions& options) {
  DiagnosticsReport report;
  report.drift = estimate_drift_constants(spec, options.drift_grid, options.margin);
  report.convergence = distance_decay(spec, options.decay);
  if (report.convergence.already_stationary) {
    report.notes.emplace_back("already stationary: every lag is at the Monte Carlo noise floor");
  }
  if (!report.convergence.reference_stationary) {
    report.notes.emplace_back("reference sample halves disagree beyond the noise floor; consider a longer burn-in");
  }

  const std::size_t longest = std::max(
      options.mcse_lengths.empty() ? std::size_t{0}
                                   : *std::max_element(options.mcse_lengths.begin(), options.mcse_lengths.end()),
      100 * options.autocov_max_lag);
  const std::vector<double> pi = stationary_distribution(spec.transition()).probabilities;
  const std::uint64_t seed = derive_seed(options.decay.master_seed, kLongPathStream);
  const Path path =
      simulate_path(spec, stationary_initial_regime(pi, seed), 0.0, options.decay.burn_in + longest, seed);
  if (path.diverged) throw Error(ErrorCode::non_finite_value, "long diagnostic path diverged");
  const std::span<const double> section(path.values.data() + options.decay.burn_in, longest);

  if (options.autocov_max_lag > 0) {
    report.convergence.autocov = autocov_decay(section, options.autocov_max_lag);
    if (!report.convergence.autocov->informative) {
      report.notes.emplace_back("autocovariance is at the noise floor at lag 1; rate fit uninformative");
    }
  }
  for (const std::size_t n : options.mcse_lengths) {
    const BatchMeans bm = batch_means_mcse(section.first(n), options.batches);
    report.convergence.mcse_table.push_back(
        McseRow{n, bm.mean, bm.mcse, bm.mcse * std::sqrt(static_cast<double>(bm.used))});
  }
  return report;
}

}  // namespace svcharme
