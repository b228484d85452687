#pragma once

// Regularization schedules. Each schedule is a stateful iterator that, for
// k = 0, 1, 2, ..., yields the current regularization matrix R_k, the change
// R_k - R_{k-1} in structured form, and the regularization target theta_reg.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>

#include "tvrls/matkit.hpp"
#include "tvrls/matrix.hpp"

namespace tvrls {

enum class DeltaKind {
  zero,   // R_k == R_{k-1}
  full,   // dense change (rank up to n)
  rank1,  // R_k = R_{k-1} - coeff * v v^T
};

/// R_k, either stored densely or held as eigen-weights over a shared basis
/// and formed on first access.
class RegMatrix {
 public:
  explicit RegMatrix(Matrix dense);
  /// R = sum_i weights[i] * b_i b_i^T with b_i the columns of basis.
  RegMatrix(std::shared_ptr<const Matrix> basis, Vector weights);

  const Matrix& get() const;
  std::size_t dim() const { return n_; }
  /// Eigen-weights when held in factored form, else empty.
  const Vector& weights() const { return weights_; }

 private:
  std::size_t n_;
  std::shared_ptr<const Matrix> basis_;
  Vector weights_;
  mutable std::once_flag once_;
  mutable Matrix value_;
};

/// Regularization output for one step. At k = 0 the change is taken against
/// an empty regularizer, so the kind is `full` with `full == R_0`.
struct RegDelta {
  std::size_t step = 0;
  DeltaKind kind = DeltaKind::zero;
  Matrix full;
  double coeff = 0.0;
  Vector direction;
  std::shared_ptr<const RegMatrix> r_current;
  Vector theta_reg;

  const Matrix& current() const { return r_current->get(); }
  std::size_t dim() const { return r_current ? r_current->dim() : 0; }
  /// R_k - R_{k-1} as a dense matrix, whatever the kind.
  Matrix difference() const;
};

enum class ScheduleKind { constant, fading, rank1_fading };

const char* to_string(ScheduleKind kind);
std::optional<ScheduleKind> schedule_kind_from_string(std::string_view name);

class Schedule {
 public:
  virtual ~Schedule() = default;

  /// Next output. Steps must be requested in order 0, 1, 2, ...
  RegDelta step(std::size_t k);

  virtual ScheduleKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  /// First step from which R_k is identically zero; nullopt if never.
  virtual std::optional<std::size_t> zero_from() const = 0;
  /// Last step whose change is nonzero; nullopt if changes never stop.
  virtual std::optional<std::size_t> last_change() const = 0;
  /// A new schedule with the same parameters, positioned at k = 0.
  virtual std::unique_ptr<Schedule> fresh() const = 0;

 protected:
  virtual RegDelta next(std::size_t k) = 0;

 private:
  std::size_t expected_ = 0;
};

/// Classical RLS: R_k = R_0 and theta_reg,k = theta_reg for every k.
class ConstantSchedule final : public Schedule {
 public:
  ConstantSchedule(Matrix r0, Vector theta_reg);

  ScheduleKind kind() const override { return ScheduleKind::constant; }
  std::size_t dim() const override { return r0_->dim(); }
  std::optional<std::size_t> zero_from() const override { return std::nullopt; }
  std::optional<std::size_t> last_change() const override { return 0; }
  std::unique_ptr<Schedule> fresh() const override;

 protected:
  RegDelta next(std::size_t k) override;

 private:
  std::shared_ptr<const RegMatrix> r0_;
  Vector theta_reg_;
};

struct FadingParams {
  Matrix r0;
  double mu = 0.99;
  std::optional<std::size_t> k_cut;  // nullopt: never cut

  void validate() const;
};

/// R_0 = r0; for k >= 1, R_k = mu^k r0 while k < k_cut and zero afterwards.
class FadingSchedule final : public Schedule {
 public:
  FadingSchedule(FadingParams params, Vector theta_reg);

  ScheduleKind kind() const override { return ScheduleKind::fading; }
  std::size_t dim() const override { return params_.r0.rows(); }
  std::optional<std::size_t> zero_from() const override;
  std::optional<std::size_t> last_change() const override { return zero_from(); }
  std::unique_ptr<Schedule> fresh() const override;
  const FadingParams& params() const { return params_; }

 protected:
  RegDelta next(std::size_t k) override;

 private:
  FadingParams params_;
  Vector theta_reg_;
  std::shared_ptr<const RegMatrix> prev_;
  std::shared_ptr<const RegMatrix> zero_;
};

struct R1FRParams {
  Matrix r0;
  double mu = 0.99;
  std::optional<std::size_t> j_cut;  // nullopt: never cut
  EigenPair eigen;                   // of r0, values descending

  /// Builds the parameters and the eigendecomposition of r0.
  static R1FRParams make(Matrix r0, double mu, std::optional<std::size_t> j_cut);
  void validate() const;
  std::size_t dim() const { return r0.rows(); }
};

/// Rank-1 fading regularization. Step k in 1..(j_cut+1)n removes part of one
/// eigen-direction of r0: directions cycle in descending-eigenvalue order,
/// each shrinking by mu^n per cycle, and the final cycle removes them fully.
class Rank1FadingSchedule final : public Schedule {
 public:
  Rank1FadingSchedule(R1FRParams params, Vector theta_reg);

  ScheduleKind kind() const override { return ScheduleKind::rank1_fading; }
  std::size_t dim() const override { return params_.dim(); }
  std::optional<std::size_t> zero_from() const override;
  std::optional<std::size_t> last_change() const override { return zero_from(); }
  std::unique_ptr<Schedule> fresh() const override;
  const R1FRParams& params() const { return params_; }

  /// Coefficient c_k and 0-based eigen-direction index for step k >= 1
  /// inside the active window.
  struct Rank1Step {
    double coeff;
    std::size_t direction;
  };
  Rank1Step rank1_step(std::size_t k) const;

 protected:
  RegDelta next(std::size_t k) override;

 private:
  R1FRParams params_;
  Vector theta_reg_;
  std::shared_ptr<const Matrix> basis_;
  Vector weights_;  // eigen-weights of R_k
  std::shared_ptr<const RegMatrix> r0_;
  std::shared_ptr<const RegMatrix> zero_;
};

/// Closed-form R_k of the rank-1 fading schedule (reduced directions decay
/// by mu^n per cycle). Test oracle for the accumulated recursion.
Matrix r1fr_closed_form(const R1FRParams& params, std::size_t k);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::fading;
  Matrix r0;
  Vector theta_reg;
  double mu = 0.99;
  std::optional<std::size_t> k_cut;
  std::optional<std::size_t> j_cut;
};

std::unique_ptr<Schedule> make_schedule(const ScheduleSpec& spec);

}  // namespace tvrls
