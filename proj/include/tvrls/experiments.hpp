#pragma once

// Synthetic data, single runs, Monte Carlo summaries and per-step timing.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvrls/analysis.hpp"
#include "tvrls/config.hpp"
#include "tvrls/estimators.hpp"
#include "tvrls/rng.hpp"

namespace tvrls {

struct Dataset {
  TrueModel model;
  History data;
};

/// theta ~ N(0, I_n), then for each step the p x n regressor (zeroed after
/// non_pe_stop in non_pe mode) and the noise vector; gamma = I_p.
Dataset gen_data(const ExperimentConfig& cfg, Rng& rng);
Dataset gen_data(const ExperimentConfig& cfg, std::uint64_t seed);

/// r0 = r0_scale * I_n, theta_reg = 0, schedule parameters from cfg.
EstimatorParams estimator_params(const ExperimentConfig& cfg);

struct Excitation {
  /// lambda_min of the accumulated sum after data index k; NaN where the
  /// monitor cadence skipped the step.
  Vector lambda_min;
  std::optional<std::size_t> k_rank;
  double lambda_min_at_k_rank = 0.0;
};

Excitation monitor_excitation(const History& data, std::size_t cadence);

struct TraceRow {
  std::size_t k = 0;          // theta_k after k measurements
  double error_norm = 0.0;    // |theta_k - theta|
  double lambda_min = 0.0;    // of the sum through data index k - 1
  double r_max = 0.0;         // lambda_max(R_{k-1})
  double step_ms = 0.0;       // wall time of the update producing theta_k
  std::optional<double> bound;
};

struct ErrorTrace {
  EstimatorKind kind = EstimatorKind::classical;
  DataMode mode = DataMode::pe;
  std::optional<std::size_t> k_rank;
  std::vector<TraceRow> rows;

  /// Row for theta_k, k >= 1.
  const TraceRow& at(std::size_t k) const { return rows.at(k - 1); }
};

/// Runs one estimator over a dataset. `excitation` may be shared across
/// estimators on the same data; it is computed when null.
ErrorTrace run_on_data(const ExperimentConfig& cfg, const Dataset& ds, EstimatorKind kind,
                       const Excitation* excitation = nullptr);
ErrorTrace run_single(const ExperimentConfig& cfg, EstimatorKind kind);

struct McRow {
  std::size_t k = 0;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct McSummary {
  EstimatorKind kind = EstimatorKind::classical;
  std::size_t trials = 0;
  std::vector<McRow> rows;

  const McRow& at(std::size_t k) const { return rows.at(k - 1); }
};

/// One summary per configured estimator. Trial t uses seed
/// mix_seed(cfg.seed, t); every estimator sees the same trial data.
/// Needs trials >= 2.
std::vector<McSummary> run_monte_carlo(const ExperimentConfig& cfg);

inline constexpr std::size_t timing_warmup = 20;

struct TimingRow {
  EstimatorKind kind = EstimatorKind::classical;
  std::string phase;  // "fading" or "post-cutoff"
  double mean_ms = 0.0;
  double ci_lo_ms = 0.0;
  double ci_hi_ms = 0.0;
  std::size_t samples = 0;
};

struct TimingSummary {
  std::vector<TimingRow> rows;

  const TimingRow* find(EstimatorKind kind, const std::string& phase) const;
};

/// Single-threaded per-step timing. A step k belongs to the fading phase
/// while the estimator's schedule still changes (classical uses the fading
/// cutoff k_cut); the first timing_warmup steps are dropped.
TimingSummary run_timing(const ExperimentConfig& cfg);

/// mean +- 1.96 * sd / sqrt(count); needs at least two samples.
McRow mean_interval(const std::vector<double>& xs);

}  // namespace tvrls
