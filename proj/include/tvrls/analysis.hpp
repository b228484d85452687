#pragma once

// Error dynamics and excitation diagnostics for noise-free data y = phi theta.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tvrls/estimators.hpp"
#include "tvrls/matrix.hpp"
#include "tvrls/regularizers.hpp"

namespace tvrls {

struct TrueModel {
  Vector theta;
};

/// One step of the estimation-error recursion:
///   e_{k+1} = P_{k+1} [P_k^{-1} e_k + R_k (theta_reg,k - theta)
///                                   - R_{k-1} (theta_reg,k-1 - theta)]
Vector propagate_error(std::span<const double> prev_error, const Matrix& p_k_inv,
                       const Matrix& p_k1, const RegDelta& reg_k, const RegDelta& reg_km1,
                       const TrueModel& model);

/// Error of the regularized minimizer on noise-free data:
///   (R_k + S_k)^{-1} R_k (theta_reg,k - theta),  S_k = sum phi^T G phi.
Vector closed_form_error(std::span<const MeasurementTriple> h, const RegDelta& reg,
                         const TrueModel& model);

/// lambda_max(R_k) / lambda_min(S_{k_rank}) * (|theta_reg,k| + |theta|).
/// Throws RankNotAttained when lambda_min(s_krank) <= 0.
double attractivity_bound(const RegDelta& reg, const Matrix& s_krank, double theta_reg_norm,
                          double theta_norm);
/// Same bound from precomputed eigenvalue extremes.
double attractivity_bound(double r_max, double s_krank_lambda_min, double theta_reg_norm,
                          double theta_norm);

/// Default rank threshold for an accumulated sum with largest eigenvalue
/// lambda_max: 1e-8 * (1 + lambda_max).
double rank_threshold(double lambda_max);

struct KRankResult {
  std::optional<std::size_t> k_rank;
  /// lambda_min of sum_{i<=k} phi_i^T G_i phi_i for every k in h.
  Vector lambda_min;
};

/// Smallest k whose accumulated sum has lambda_min above the threshold
/// (scale-relative default when none is given).
KRankResult detect_k_rank(std::span<const MeasurementTriple> h,
                          std::optional<double> threshold = std::nullopt);

/// Incremental form of detect_k_rank. The accumulated sum is eigensolved at
/// every step until full rank is reached, then every `cadence` steps.
class ExcitationMonitor {
 public:
  ExcitationMonitor(std::size_t n, std::size_t cadence = 0,
                    std::optional<double> threshold = std::nullopt);

  /// Adds measurement k = steps(); returns lambda_min when it was evaluated.
  std::optional<double> add(const MeasurementTriple& m);

  std::size_t steps() const { return steps_; }
  std::size_t cadence() const { return cadence_; }
  std::optional<std::size_t> k_rank() const { return k_rank_; }
  /// lambda_min(S_{k_rank}); only meaningful once k_rank() is set.
  double lambda_min_at_k_rank() const { return lambda_at_rank_; }
  const Matrix& accumulated() const { return sum_; }

  static std::size_t default_cadence(std::size_t n) { return n <= 128 ? 1 : 10; }

 private:
  Matrix sum_;
  std::size_t cadence_;
  std::optional<double> threshold_;
  std::size_t steps_ = 0;
  std::optional<std::size_t> k_rank_;
  double lambda_at_rank_ = 0.0;
};

}  // namespace tvrls
