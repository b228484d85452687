#include "tvrls/analysis.hpp"

#include <cmath>
#include <limits>

#include "tvrls/error.hpp"
#include "tvrls/kernels.hpp"
#include "tvrls/matkit.hpp"

namespace tvrls {

namespace {

void require_dim(std::size_t got, std::size_t n, const char* what) {
  if (got != n) {
    throw Error(ErrorKind::dimension_mismatch, std::string(what) + " has the wrong dimension");
  }
}

}  // namespace

Vector propagate_error(std::span<const double> prev_error, const Matrix& p_k_inv,
                       const Matrix& p_k1, const RegDelta& reg_k, const RegDelta& reg_km1,
                       const TrueModel& model) {
  const std::size_t n = model.theta.size();
  require_dim(prev_error.size(), n, "previous error");
  require_dim(p_k_inv.rows(), n, "P_k^{-1}");
  require_dim(p_k1.rows(), n, "P_{k+1}");
  Vector bracket = p_k_inv * prev_error;
  axpy(1.0, reg_k.current() * std::span<const double>(sub(reg_k.theta_reg, model.theta)),
       bracket);
  axpy(-1.0, reg_km1.current() * std::span<const double>(sub(reg_km1.theta_reg, model.theta)),
       bracket);
  return p_k1 * std::span<const double>(bracket);
}

Vector closed_form_error(std::span<const MeasurementTriple> h, const RegDelta& reg,
                         const TrueModel& model) {
  const std::size_t n = model.theta.size();
  require_dim(reg.dim(), n, "regularization");
  Matrix a = reg.current();
  for (const auto& m : h) {
    m.check(n);
    kernels::add_weighted_gram(a, m.phi, m.gamma);
  }
  symmetrize(a);
  const Vector rhs = reg.current() * std::span<const double>(sub(reg.theta_reg, model.theta));
  return chol_solve(chol_factor(a), std::span<const double>(rhs));
}

double attractivity_bound(double r_max, double s_krank_lambda_min, double theta_reg_norm,
                          double theta_norm) {
  if (!(s_krank_lambda_min > 0.0)) {
    throw Error(ErrorKind::rank_not_attained,
                "accumulated regressor sum is not positive definite");
  }
  return r_max / s_krank_lambda_min * (theta_reg_norm + theta_norm);
}

double attractivity_bound(const RegDelta& reg, const Matrix& s_krank, double theta_reg_norm,
                          double theta_norm) {
  const Extremes s = lambda_extreme(s_krank);
  if (!(s.min > rank_threshold(s.max))) {
    throw Error(ErrorKind::rank_not_attained,
                "accumulated regressor sum is rank deficient");
  }
  const double r_max = max_abs(reg.current()) == 0.0 ? 0.0 : lambda_extreme(reg.current()).max;
  return attractivity_bound(r_max, s.min, theta_reg_norm, theta_norm);
}

double rank_threshold(double lambda_max) { return 1e-8 * (1.0 + std::abs(lambda_max)); }

KRankResult detect_k_rank(std::span<const MeasurementTriple> h, std::optional<double> threshold) {
  KRankResult out;
  if (h.empty()) return out;
  const std::size_t n = h.front().dim();
  Matrix sum(n, n);
  out.lambda_min.reserve(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    h[k].check(n);
    kernels::add_weighted_gram(sum, h[k].phi, h[k].gamma);
    symmetrize(sum);
    const Extremes e = lambda_extreme(sum);
    out.lambda_min.push_back(e.min);
    const double tol = threshold ? *threshold : rank_threshold(e.max);
    if (!out.k_rank && e.min > tol) out.k_rank = k;
  }
  return out;
}

ExcitationMonitor::ExcitationMonitor(std::size_t n, std::size_t cadence,
                                     std::optional<double> threshold)
    : sum_(n, n), cadence_(cadence == 0 ? default_cadence(n) : cadence), threshold_(threshold) {}

std::optional<double> ExcitationMonitor::add(const MeasurementTriple& m) {
  m.check(sum_.rows());
  const std::size_t k = steps_++;
  kernels::add_weighted_gram(sum_, m.phi, m.gamma);
  symmetrize(sum_);
  const bool due = !k_rank_ || (k - *k_rank_) % cadence_ == 0;
  if (!due) return std::nullopt;
  const Extremes e = lambda_extreme(sum_);
  if (!k_rank_) {
    const double tol = threshold_ ? *threshold_ : rank_threshold(e.max);
    if (e.min > tol) {
      k_rank_ = k;
      lambda_at_rank_ = e.min;
    }
  }
  return e.min;
}

}  // namespace tvrls
