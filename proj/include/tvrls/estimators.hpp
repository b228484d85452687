#pragma once

// Least-squares estimators with time-varying regularization.
//
// Free functions implement the individual update rules on an EstimatorState
// value; the Estimator classes pair one rule set with a Schedule behind a
// common update()/theta()/covariance() contract.
//
//   information form  P^{-1} is accumulated and a Cholesky solve gives the
//                     estimate update: O(n^3) per step, any regularization.
//   covariance form   P is updated by the matrix inversion lemma: O(q n^2)
//                     per step where q is the number of (augmented) rows.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tvrls/matrix.hpp"
#include "tvrls/regularizers.hpp"

namespace tvrls {

/// One step of data: y = phi * theta + noise, weighted by gamma.
struct MeasurementTriple {
  Matrix phi;    // p x n regressor
  Vector y;      // p measurements
  Matrix gamma;  // p x p positive definite weight

  std::size_t rows() const { return phi.rows(); }
  std::size_t dim() const { return phi.cols(); }
  /// Throws DimensionMismatch unless shapes agree with n parameters.
  void check(std::size_t n) const;
};

using History = std::vector<MeasurementTriple>;

enum class Form { covariance, information };

struct EstimatorState {
  Vector theta;        // theta_k
  Form form = Form::covariance;
  Matrix p_cov;        // P_k, covariance form only
  Matrix p_info;       // P_k^{-1}, information form only
  std::size_t k = 0;   // measurements consumed so far
  RegDelta prev_reg;   // regularization used to produce theta_k
};

/// Minimizer of the regularized cost over h with regularization reg:
/// (R + sum phi^T G phi)^{-1} (R theta_reg + sum phi^T G y).
Vector batch_solve(std::span<const MeasurementTriple> h, const RegDelta& reg);

/// theta_0 = theta_reg,0 and P_0 = R_0^{-1} (covariance form).
EstimatorState covariance_prior(const RegDelta& reg0);
/// theta_0 = theta_reg,0 and P_0^{-1} = R_0 (information form).
EstimatorState information_prior(const RegDelta& reg0);

/// First information-form step: P_1^{-1} = R_0 + phi_0^T G_0 phi_0.
EstimatorState tvr_init(const RegDelta& reg0, const MeasurementTriple& m0);

/// General information-form step with any regularization change.
EstimatorState tvr_update(EstimatorState s, const RegDelta& reg, const MeasurementTriple& m);

/// Classical covariance-form RLS step (no regularization change).
EstimatorState rls_mil_update(EstimatorState s, const MeasurementTriple& m);

/// Covariance-form step for a rank-1 (or zero) regularization change: the
/// removed direction is appended to the regressor with weight -c_k.
EstimatorState r1fr_update(EstimatorState s, const RegDelta& reg, const MeasurementTriple& m);

/// Switches an information-form state to covariance form (one SPD inverse).
EstimatorState to_covariance_form(EstimatorState s);

enum class EstimatorKind { classical, fr, r1fr, tvr_general };

const char* to_string(EstimatorKind kind);
/// Plot label: RLS, FR-RLS, R1FR-RLS, TVR-RLS.
const char* label(EstimatorKind kind);
std::optional<EstimatorKind> estimator_kind_from_string(std::string_view name);

struct EstimatorParams {
  Matrix r0;
  Vector theta_reg;
  double mu = 0.99;
  std::optional<std::size_t> k_cut;
  std::optional<std::size_t> j_cut;
  /// Regularization used by the tvr-general estimator.
  ScheduleKind general_schedule = ScheduleKind::fading;
};

/// Stateful estimator. update() consumes measurements 0, 1, 2, ... in order.
class Estimator {
 public:
  explicit Estimator(std::unique_ptr<Schedule> schedule);
  virtual ~Estimator() = default;
  Estimator(const Estimator&) = delete;
  Estimator& operator=(const Estimator&) = delete;

  void update(const MeasurementTriple& m);

  const Vector& theta() const { return state_.theta; }
  /// P_k; computed by inversion when the information form is held.
  Matrix covariance() const;
  const EstimatorState& state() const { return state_; }
  std::size_t steps() const { return state_.k; }
  /// Regularization used for the most recent update (R_{k-1} for theta_k).
  const RegDelta& last_reg() const { return state_.prev_reg; }
  const Schedule& schedule() const { return *schedule_; }

  virtual EstimatorKind kind() const = 0;

 protected:
  virtual EstimatorState prior(const RegDelta& reg0) const = 0;
  virtual EstimatorState first(EstimatorState s, const RegDelta& reg0,
                               const MeasurementTriple& m0) = 0;
  virtual EstimatorState advance(EstimatorState s, const RegDelta& reg,
                                 const MeasurementTriple& m) = 0;

  void reset();

 private:
  std::unique_ptr<Schedule> schedule_;
  RegDelta reg0_;
  EstimatorState state_;
};

/// Constant regularization, covariance form throughout.
class ClassicalRls final : public Estimator {
 public:
  ClassicalRls(Matrix r0, Vector theta_reg);
  EstimatorKind kind() const override { return EstimatorKind::classical; }

 protected:
  EstimatorState prior(const RegDelta& reg0) const override;
  EstimatorState first(EstimatorState s, const RegDelta& reg0,
                       const MeasurementTriple& m0) override;
  EstimatorState advance(EstimatorState s, const RegDelta& reg,
                         const MeasurementTriple& m) override;
};

/// Information form for every step, whatever the schedule.
class GeneralTvrRls final : public Estimator {
 public:
  explicit GeneralTvrRls(std::unique_ptr<Schedule> schedule);
  EstimatorKind kind() const override { return EstimatorKind::tvr_general; }

 protected:
  EstimatorState prior(const RegDelta& reg0) const override;
  EstimatorState first(EstimatorState s, const RegDelta& reg0,
                       const MeasurementTriple& m0) override;
  EstimatorState advance(EstimatorState s, const RegDelta& reg,
                         const MeasurementTriple& m) override;
};

/// Fading regularization: information form while R_k changes, one inversion
/// at the cutoff step, then classical covariance-form updates.
class FadingRls final : public Estimator {
 public:
  FadingRls(FadingParams params, Vector theta_reg);
  EstimatorKind kind() const override { return EstimatorKind::fr; }

 protected:
  EstimatorState prior(const RegDelta& reg0) const override;
  EstimatorState first(EstimatorState s, const RegDelta& reg0,
                       const MeasurementTriple& m0) override;
  EstimatorState advance(EstimatorState s, const RegDelta& reg,
                         const MeasurementTriple& m) override;
};

/// Rank-1 fading regularization, covariance form from P_0 = R_0^{-1}.
class Rank1FadingRls final : public Estimator {
 public:
  Rank1FadingRls(R1FRParams params, Vector theta_reg);
  EstimatorKind kind() const override { return EstimatorKind::r1fr; }

 protected:
  EstimatorState prior(const RegDelta& reg0) const override;
  EstimatorState first(EstimatorState s, const RegDelta& reg0,
                       const MeasurementTriple& m0) override;
  EstimatorState advance(EstimatorState s, const RegDelta& reg,
                         const MeasurementTriple& m) override;
};

/// Throws ConfigError on inconsistent parameters.
std::unique_ptr<Estimator> make_estimator(EstimatorKind kind, const EstimatorParams& params);

}  // namespace tvrls
