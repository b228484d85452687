#include "tvrls/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "tvrls/error.hpp"
#include "tvrls/kernels.hpp"

namespace tvrls {

namespace {

void require_positive_definite(const Matrix& r0, const char* who) {
  if (r0.empty() || !r0.is_square()) {
    throw Error(ErrorKind::config, std::string(who) + ": r0 must be a nonempty square matrix");
  }
  try {
    (void)chol_factor(r0);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, std::string(who) + ": r0 must be positive definite (" +
                                       e.what() + ")");
  }
}

void require_mu(double mu, const char* who) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw Error(ErrorKind::config, std::string(who) + ": mu must lie in (0, 1)");
  }
}

void require_theta(const Vector& theta_reg, std::size_t n, const char* who) {
  if (theta_reg.size() != n) {
    throw Error(ErrorKind::config, std::string(who) + ": theta_reg has wrong length");
  }
}

}  // namespace

RegMatrix::RegMatrix(Matrix dense) : n_(dense.rows()) {
  std::call_once(once_, [&] { value_ = std::move(dense); });
}

RegMatrix::RegMatrix(std::shared_ptr<const Matrix> basis, Vector weights)
    : n_(basis->rows()), basis_(std::move(basis)), weights_(std::move(weights)) {}

const Matrix& RegMatrix::get() const {
  std::call_once(once_, [&] {
    Matrix scaled_basis = *basis_;
    bool zero = true;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) scaled_basis(i, j) *= weights_[j];
    }
    for (double w : weights_) zero = zero && w == 0.0;
    value_ = zero ? Matrix(n_, n_) : kernels::multiply_abt(scaled_basis, *basis_);
    symmetrize(value_);
  });
  return value_;
}

Matrix RegDelta::difference() const {
  const std::size_t n = dim();
  switch (kind) {
    case DeltaKind::full: return full;
    case DeltaKind::rank1: {
      Matrix d(n, n);
      kernels::add_scaled_outer(d, -coeff, direction);
      return d;
    }
    case DeltaKind::zero: break;
  }
  return Matrix(n, n);
}

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::fading: return "fading";
    case ScheduleKind::rank1_fading: return "rank1_fading";
  }
  return "unknown";
}

std::optional<ScheduleKind> schedule_kind_from_string(std::string_view name) {
  if (name == "constant") return ScheduleKind::constant;
  if (name == "fading") return ScheduleKind::fading;
  if (name == "rank1_fading" || name == "r1fr") return ScheduleKind::rank1_fading;
  return std::nullopt;
}

RegDelta Schedule::step(std::size_t k) {
  if (k != expected_) {
    throw Error(ErrorKind::config, "schedule stepped out of order: expected step " +
                                       std::to_string(expected_) + ", got " +
                                       std::to_string(k));
  }
  RegDelta d = next(k);
  d.step = k;
  ++expected_;
  return d;
}

// --- constant -------------------------------------------------------------

ConstantSchedule::ConstantSchedule(Matrix r0, Vector theta_reg)
    : theta_reg_(std::move(theta_reg)) {
  if (r0.empty() || !r0.is_square()) {
    throw Error(ErrorKind::config, "constant schedule: r0 must be a nonempty square matrix");
  }
  require_theta(theta_reg_, r0.rows(), "constant schedule");
  r0_ = std::make_shared<const RegMatrix>(std::move(r0));
}

std::unique_ptr<Schedule> ConstantSchedule::fresh() const {
  return std::make_unique<ConstantSchedule>(r0_->get(), theta_reg_);
}

RegDelta ConstantSchedule::next(std::size_t k) {
  RegDelta d;
  d.r_current = r0_;
  d.theta_reg = theta_reg_;
  if (k == 0) {
    d.kind = DeltaKind::full;
    d.full = r0_->get();
  }
  return d;
}

// --- fading ---------------------------------------------------------------

void FadingParams::validate() const {
  require_positive_definite(r0, "fading schedule");
  require_mu(mu, "fading schedule");
}

FadingSchedule::FadingSchedule(FadingParams params, Vector theta_reg)
    : params_(std::move(params)), theta_reg_(std::move(theta_reg)) {
  params_.validate();
  require_theta(theta_reg_, params_.r0.rows(), "fading schedule");
  const std::size_t n = params_.r0.rows();
  zero_ = std::make_shared<const RegMatrix>(Matrix(n, n));
}

std::optional<std::size_t> FadingSchedule::zero_from() const {
  if (!params_.k_cut) return std::nullopt;
  return std::max<std::size_t>(*params_.k_cut, 1);
}

std::unique_ptr<Schedule> FadingSchedule::fresh() const {
  return std::make_unique<FadingSchedule>(params_, theta_reg_);
}

RegDelta FadingSchedule::next(std::size_t k) {
  RegDelta d;
  d.theta_reg = theta_reg_;
  const auto cut = zero_from();
  if (k == 0) {
    d.kind = DeltaKind::full;
    d.full = params_.r0;
    d.r_current = std::make_shared<const RegMatrix>(params_.r0);
  } else if (!cut || k < *cut) {
    d.kind = DeltaKind::full;
    d.r_current = std::make_shared<const RegMatrix>(
        params_.r0 * std::pow(params_.mu, static_cast<double>(k)));
    d.full = d.current() - prev_->get();
  } else if (k == *cut) {
    d.kind = DeltaKind::full;
    d.r_current = zero_;
    d.full = zero_->get() - prev_->get();
  } else {
    d.kind = DeltaKind::zero;
    d.r_current = zero_;
  }
  prev_ = d.r_current;
  return d;
}

// --- rank-1 fading --------------------------------------------------------

R1FRParams R1FRParams::make(Matrix r0, double mu, std::optional<std::size_t> j_cut) {
  require_positive_definite(r0, "rank-1 fading schedule");
  R1FRParams p;
  p.eigen = sym_eigen(r0);
  p.r0 = std::move(r0);
  p.mu = mu;
  p.j_cut = j_cut;
  p.validate();
  return p;
}

void R1FRParams::validate() const {
  require_positive_definite(r0, "rank-1 fading schedule");
  require_mu(mu, "rank-1 fading schedule");
  const std::size_t n = r0.rows();
  if (eigen.values.size() != n || eigen.vectors.rows() != n || eigen.vectors.cols() != n) {
    throw Error(ErrorKind::config, "rank-1 fading schedule: eigendecomposition missing");
  }
  for (double d : eigen.values) {
    if (!(d > 0.0)) {
      throw Error(ErrorKind::config, "rank-1 fading schedule: r0 eigenvalues must be positive");
    }
  }
}

Rank1FadingSchedule::Rank1FadingSchedule(R1FRParams params, Vector theta_reg)
    : params_(std::move(params)), theta_reg_(std::move(theta_reg)) {
  params_.validate();
  require_theta(theta_reg_, params_.dim(), "rank-1 fading schedule");
  const std::size_t n = params_.dim();
  basis_ = std::make_shared<const Matrix>(params_.eigen.vectors);
  weights_ = params_.eigen.values;
  r0_ = std::make_shared<const RegMatrix>(params_.r0);
  zero_ = std::make_shared<const RegMatrix>(Matrix(n, n));
}

std::optional<std::size_t> Rank1FadingSchedule::zero_from() const {
  if (!params_.j_cut) return std::nullopt;
  return (*params_.j_cut + 1) * params_.dim();
}

std::unique_ptr<Schedule> Rank1FadingSchedule::fresh() const {
  return std::make_unique<Rank1FadingSchedule>(params_, theta_reg_);
}

Rank1FadingSchedule::Rank1Step Rank1FadingSchedule::rank1_step(std::size_t k) const {
  const std::size_t n = params_.dim();
  const std::size_t cycle = (k - 1) / n;
  const std::size_t dir = (k - 1) % n;
  const double decay = std::pow(params_.mu, static_cast<double>(cycle * n));
  const double d = params_.eigen.values[dir];
  const bool final_cycle = params_.j_cut && cycle == *params_.j_cut;
  const double coeff =
      final_cycle ? decay * d
                  : decay * (1.0 - std::pow(params_.mu, static_cast<double>(n))) * d;
  return Rank1Step{coeff, dir};
}

RegDelta Rank1FadingSchedule::next(std::size_t k) {
  RegDelta d;
  d.theta_reg = theta_reg_;
  const auto cut = zero_from();
  if (k == 0) {
    d.kind = DeltaKind::full;
    d.full = params_.r0;
    d.r_current = r0_;
  } else if (cut && k > *cut) {
    d.kind = DeltaKind::zero;
    d.r_current = zero_;
  } else {
    const Rank1Step s = rank1_step(k);
    d.kind = DeltaKind::rank1;
    d.coeff = s.coeff;
    d.direction = params_.eigen.vector(s.direction);
    if (cut && k == *cut) {
      std::fill(weights_.begin(), weights_.end(), 0.0);
      d.r_current = zero_;
    } else {
      weights_[s.direction] -= s.coeff;
      d.r_current = std::make_shared<const RegMatrix>(basis_, weights_);
    }
  }
  return d;
}

Matrix r1fr_closed_form(const R1FRParams& params, std::size_t k) {
  const std::size_t n = params.dim();
  const std::size_t cycle = k / n;
  const std::size_t l = k % n;
  Matrix r(n, n);
  if (params.j_cut && cycle > *params.j_cut) return r;
  const double decay = std::pow(params.mu, static_cast<double>(cycle * n));
  const bool final_cycle = params.j_cut && cycle == *params.j_cut;
  const double reduced = final_cycle ? 0.0 : std::pow(params.mu, static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = (i < l ? reduced : 1.0) * decay * params.eigen.values[i];
    if (weight == 0.0) continue;
    const Vector v = params.eigen.vector(i);
    kernels::add_scaled_outer(r, weight, v);
  }
  return r;
}

std::unique_ptr<Schedule> make_schedule(const ScheduleSpec& spec) {
  switch (spec.kind) {
    case ScheduleKind::constant:
      return std::make_unique<ConstantSchedule>(spec.r0, spec.theta_reg);
    case ScheduleKind::fading:
      return std::make_unique<FadingSchedule>(FadingParams{spec.r0, spec.mu, spec.k_cut},
                                              spec.theta_reg);
    case ScheduleKind::rank1_fading:
      return std::make_unique<Rank1FadingSchedule>(R1FRParams::make(spec.r0, spec.mu, spec.j_cut),
                                                   spec.theta_reg);
  }
  throw Error(ErrorKind::config, "unknown schedule kind");
}

}  // namespace tvrls
