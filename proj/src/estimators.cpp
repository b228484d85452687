#include "tvrls/estimators.hpp"

#include <string>

#include "tvrls/error.hpp"
#include "tvrls/kernels.hpp"
#include "tvrls/matkit.hpp"

namespace tvrls {

namespace {

// phi^T * (gamma * e)
Vector weighted_back_projection(const MeasurementTriple& m, std::span<const double> e) {
  const Vector ge = m.gamma * e;
  Vector out(m.dim(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) axpy(ge[r], m.phi.row(r), out);
  return out;
}

Vector innovation(const MeasurementTriple& m, std::span<const double> theta) {
  return sub(m.y, m.phi * theta);
}

bool same_target(const Vector& a, const Vector& b) { return a == b; }

// Covariance-form update with q stacked rows and inverse weight winv:
//   U = P phi^T, S = winv + phi U, K = U S^{-1},
//   theta += K (y - phi theta), P -= K U^T.
void covariance_step(Matrix& p, Vector& theta, const Matrix& phi, const Matrix& winv,
                     std::span<const double> y) {
  const Matrix u = kernels::multiply_abt(p, phi);
  Matrix s = winv + phi * u;
  symmetrize(s);
  Matrix s_inv = small_inverse(s);
  symmetrize(s_inv);
  const Matrix gain = u * s_inv;
  const Vector e = sub(y, phi * std::span<const double>(theta));
  const Vector correction = gain * std::span<const double>(e);
  axpy(1.0, correction, theta);
  kernels::sym_low_rank_update(p, gain, u, -1.0);
}

template <typename F>
EstimatorState tagged(std::size_t step, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.at_step(step);
  }
}

void check_state(const EstimatorState& s, Form form, const char* who) {
  if (s.form != form) {
    throw Error(ErrorKind::config, std::string(who) + ": state is in the wrong form");
  }
}

}  // namespace

void MeasurementTriple::check(std::size_t n) const {
  const std::size_t p = phi.rows();
  if (phi.cols() != n || y.size() != p || gamma.rows() != p || gamma.cols() != p || p == 0) {
    throw Error(ErrorKind::dimension_mismatch,
                "measurement shapes disagree with " + std::to_string(n) + " parameters");
  }
}

Vector batch_solve(std::span<const MeasurementTriple> h, const RegDelta& reg) {
  const std::size_t n = reg.dim();
  Matrix a = reg.current();
  Vector b = reg.current() * std::span<const double>(reg.theta_reg);
  for (const auto& m : h) {
    m.check(n);
    kernels::add_weighted_gram(a, m.phi, m.gamma);
    axpy(1.0, weighted_back_projection(m, m.y), b);
  }
  symmetrize(a);
  return chol_solve(chol_factor(a), std::span<const double>(b));
}

EstimatorState covariance_prior(const RegDelta& reg0) {
  EstimatorState s;
  s.theta = reg0.theta_reg;
  s.form = Form::covariance;
  s.p_cov = spd_inverse(reg0.current());
  s.k = 0;
  s.prev_reg = reg0;
  return s;
}

EstimatorState information_prior(const RegDelta& reg0) {
  EstimatorState s;
  s.theta = reg0.theta_reg;
  s.form = Form::information;
  s.p_info = reg0.current();
  s.k = 0;
  s.prev_reg = reg0;
  return s;
}

EstimatorState tvr_init(const RegDelta& reg0, const MeasurementTriple& m0) {
  return tagged(0, [&] {
    m0.check(reg0.dim());
    EstimatorState s = information_prior(reg0);
    kernels::add_weighted_gram(s.p_info, m0.phi, m0.gamma);
    const CholFactor f = chol_factor(s.p_info);
    const Vector rhs = weighted_back_projection(m0, innovation(m0, s.theta));
    axpy(1.0, chol_solve(f, std::span<const double>(rhs)), s.theta);
    s.k = 1;
    return s;
  });
}

EstimatorState tvr_update(EstimatorState s, const RegDelta& reg, const MeasurementTriple& m) {
  const std::size_t step = s.k;
  return tagged(step, [&] {
    check_state(s, Form::information, "tvr_update");
    m.check(s.theta.size());

    // Bracketed residual, evaluated at theta_k before anything moves.
    Vector rhs = weighted_back_projection(m, innovation(m, s.theta));
    const RegDelta& prev = s.prev_reg;
    if (reg.kind == DeltaKind::zero) {
      if (!same_target(reg.theta_reg, prev.theta_reg)) {
        const Vector shift = sub(reg.theta_reg, prev.theta_reg);
        axpy(1.0, prev.current() * std::span<const double>(shift), rhs);
      }
    } else {
      axpy(1.0, reg.current() * std::span<const double>(sub(reg.theta_reg, s.theta)), rhs);
      axpy(-1.0, prev.current() * std::span<const double>(sub(prev.theta_reg, s.theta)), rhs);
    }

    kernels::add_weighted_gram(s.p_info, m.phi, m.gamma);
    switch (reg.kind) {
      case DeltaKind::full: s.p_info += reg.full; break;
      case DeltaKind::rank1: kernels::add_scaled_outer(s.p_info, -reg.coeff, reg.direction); break;
      case DeltaKind::zero: break;
    }
    symmetrize(s.p_info);

    const CholFactor f = chol_factor(s.p_info);
    axpy(1.0, chol_solve(f, std::span<const double>(rhs)), s.theta);
    s.k = step + 1;
    s.prev_reg = reg;
    return std::move(s);
  });
}

EstimatorState rls_mil_update(EstimatorState s, const MeasurementTriple& m) {
  const std::size_t step = s.k;
  return tagged(step, [&] {
    check_state(s, Form::covariance, "rls_mil_update");
    m.check(s.theta.size());
    const Matrix gamma_inv = spd_inverse(m.gamma);
    covariance_step(s.p_cov, s.theta, m.phi, gamma_inv, m.y);
    s.k = step + 1;
    return std::move(s);
  });
}

EstimatorState r1fr_update(EstimatorState s, const RegDelta& reg, const MeasurementTriple& m) {
  const std::size_t step = s.k;
  return tagged(step, [&] {
    check_state(s, Form::covariance, "r1fr_update");
    m.check(s.theta.size());
    if (reg.kind == DeltaKind::full) {
      throw Error(ErrorKind::config, "r1fr_update: regularization change must be rank-1 or zero");
    }
    const std::size_t n = m.dim();
    const std::size_t p = m.rows();
    const Matrix gamma_inv = spd_inverse(m.gamma);
    const bool augment = reg.kind == DeltaKind::rank1 && reg.coeff != 0.0;

    if (augment) {
      // Stacked regressor [phi; v^T] with weight diag(gamma, -c); the
      // measurement for the extra row is v^T theta_reg.
      Matrix phi_bar(p + 1, n);
      std::copy(m.phi.data(), m.phi.data() + p * n, phi_bar.data());
      std::copy(reg.direction.begin(), reg.direction.end(), phi_bar.data() + p * n);
      Matrix winv(p + 1, p + 1);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) winv(i, j) = gamma_inv(i, j);
      winv(p, p) = -1.0 / reg.coeff;
      Vector y_bar = m.y;
      y_bar.push_back(dot(reg.direction, reg.theta_reg));
      covariance_step(s.p_cov, s.theta, phi_bar, winv, y_bar);
    } else {
      covariance_step(s.p_cov, s.theta, m.phi, gamma_inv, m.y);
    }

    // A moving target adds P_{k+1} R_{k-1} (theta_reg,k - theta_reg,k-1).
    if (!same_target(reg.theta_reg, s.prev_reg.theta_reg)) {
      const Vector shift = sub(reg.theta_reg, s.prev_reg.theta_reg);
      const Vector pulled = s.prev_reg.current() * std::span<const double>(shift);
      axpy(1.0, s.p_cov * std::span<const double>(pulled), s.theta);
    }
    s.k = step + 1;
    s.prev_reg = reg;
    return std::move(s);
  });
}

EstimatorState to_covariance_form(EstimatorState s) {
  if (s.form == Form::covariance) return s;
  s.p_cov = spd_inverse(s.p_info);
  s.p_info = Matrix();
  s.form = Form::covariance;
  return s;
}

// --- kinds ----------------------------------------------------------------

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::classical: return "classical";
    case EstimatorKind::fr: return "fr";
    case EstimatorKind::r1fr: return "r1fr";
    case EstimatorKind::tvr_general: return "tvr-general";
  }
  return "unknown";
}

const char* label(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::classical: return "RLS";
    case EstimatorKind::fr: return "FR-RLS";
    case EstimatorKind::r1fr: return "R1FR-RLS";
    case EstimatorKind::tvr_general: return "TVR-RLS";
  }
  return "unknown";
}

std::optional<EstimatorKind> estimator_kind_from_string(std::string_view name) {
  if (name == "classical" || name == "rls") return EstimatorKind::classical;
  if (name == "fr") return EstimatorKind::fr;
  if (name == "r1fr") return EstimatorKind::r1fr;
  if (name == "tvr-general" || name == "tvr_general") return EstimatorKind::tvr_general;
  return std::nullopt;
}

// --- Estimator ------------------------------------------------------------

Estimator::Estimator(std::unique_ptr<Schedule> schedule) : schedule_(std::move(schedule)) {
  if (!schedule_) throw Error(ErrorKind::config, "estimator needs a schedule");
}

void Estimator::reset() {
  reg0_ = schedule_->step(0);
  state_ = prior(reg0_);
}

void Estimator::update(const MeasurementTriple& m) {
  if (state_.k == 0) {
    state_ = first(std::move(state_), reg0_, m);
  } else {
    const RegDelta reg = schedule_->step(state_.k);
    state_ = advance(std::move(state_), reg, m);
  }
  if (!all_finite(state_.theta)) {
    throw Error(ErrorKind::not_positive_definite, "estimate became non-finite", state_.k - 1);
  }
}

Matrix Estimator::covariance() const {
  if (state_.form == Form::covariance) return state_.p_cov;
  return spd_inverse(state_.p_info);
}

ClassicalRls::ClassicalRls(Matrix r0, Vector theta_reg)
    : Estimator(std::make_unique<ConstantSchedule>(std::move(r0), std::move(theta_reg))) {
  reset();
}

EstimatorState ClassicalRls::prior(const RegDelta& reg0) const { return covariance_prior(reg0); }

EstimatorState ClassicalRls::first(EstimatorState s, const RegDelta&, const MeasurementTriple& m0) {
  return rls_mil_update(std::move(s), m0);
}

EstimatorState ClassicalRls::advance(EstimatorState s, const RegDelta&,
                                     const MeasurementTriple& m) {
  return rls_mil_update(std::move(s), m);
}

GeneralTvrRls::GeneralTvrRls(std::unique_ptr<Schedule> schedule)
    : Estimator(std::move(schedule)) {
  reset();
}

EstimatorState GeneralTvrRls::prior(const RegDelta& reg0) const {
  return information_prior(reg0);
}

EstimatorState GeneralTvrRls::first(EstimatorState, const RegDelta& reg0,
                                    const MeasurementTriple& m0) {
  return tvr_init(reg0, m0);
}

EstimatorState GeneralTvrRls::advance(EstimatorState s, const RegDelta& reg,
                                      const MeasurementTriple& m) {
  return tvr_update(std::move(s), reg, m);
}

FadingRls::FadingRls(FadingParams params, Vector theta_reg)
    : Estimator(std::make_unique<FadingSchedule>(std::move(params), std::move(theta_reg))) {
  reset();
}

EstimatorState FadingRls::prior(const RegDelta& reg0) const { return information_prior(reg0); }

EstimatorState FadingRls::first(EstimatorState, const RegDelta& reg0,
                                const MeasurementTriple& m0) {
  return tvr_init(reg0, m0);
}

EstimatorState FadingRls::advance(EstimatorState s, const RegDelta& reg,
                                  const MeasurementTriple& m) {
  if (s.form == Form::covariance) {
    EstimatorState next = rls_mil_update(std::move(s), m);
    next.prev_reg = reg;
    return next;
  }
  const std::size_t step = s.k;
  EstimatorState next = tvr_update(std::move(s), reg, m);
  // The cutoff is the last rank-n change; from here on the covariance form
  // with classical updates is exact.
  const auto last = schedule().last_change();
  if (last && step >= *last) {
    next = tagged(step, [&] { return to_covariance_form(std::move(next)); });
  }
  return next;
}

Rank1FadingRls::Rank1FadingRls(R1FRParams params, Vector theta_reg)
    : Estimator(std::make_unique<Rank1FadingSchedule>(std::move(params), std::move(theta_reg))) {
  reset();
}

EstimatorState Rank1FadingRls::prior(const RegDelta& reg0) const {
  return covariance_prior(reg0);
}

EstimatorState Rank1FadingRls::first(EstimatorState s, const RegDelta&,
                                     const MeasurementTriple& m0) {
  return rls_mil_update(std::move(s), m0);
}

EstimatorState Rank1FadingRls::advance(EstimatorState s, const RegDelta& reg,
                                       const MeasurementTriple& m) {
  return r1fr_update(std::move(s), reg, m);
}

std::unique_ptr<Estimator> make_estimator(EstimatorKind kind, const EstimatorParams& params) {
  const std::size_t n = params.r0.rows();
  if (n == 0 || !params.r0.is_square()) {
    throw Error(ErrorKind::config, "r0 must be a nonempty square matrix");
  }
  if (params.theta_reg.size() != n) {
    throw Error(ErrorKind::config, "theta_reg length does not match r0");
  }
  try {
    switch (kind) {
      case EstimatorKind::classical:
        return std::make_unique<ClassicalRls>(params.r0, params.theta_reg);
      case EstimatorKind::fr:
        return std::make_unique<FadingRls>(FadingParams{params.r0, params.mu, params.k_cut},
                                           params.theta_reg);
      case EstimatorKind::r1fr:
        return std::make_unique<Rank1FadingRls>(
            R1FRParams::make(params.r0, params.mu, params.j_cut), params.theta_reg);
      case EstimatorKind::tvr_general: {
        ScheduleSpec spec{params.general_schedule, params.r0, params.theta_reg,
                          params.mu,               params.k_cut, params.j_cut};
        return std::make_unique<GeneralTvrRls>(make_schedule(spec));
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, std::string("invalid estimator parameters: ") + e.what());
  }
  throw Error(ErrorKind::config, "unknown estimator kind");
}

}  // namespace tvrls
