#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tvrls/error.hpp"
#include "tvrls/estimators.hpp"

namespace tvrls {
namespace {

using testing::batch_oracle;
using testing::random_measurement;

MeasurementTriple scalar_measurement(double phi, double y) {
  return MeasurementTriple{Matrix{{phi}}, Vector{y}, Matrix{{1.0}}};
}

RegDelta constant_reg0(const Matrix& r0, const Vector& theta_reg) {
  ConstantSchedule s(r0, theta_reg);
  return s.step(0);
}

// R_k used to produce theta_{k+1}, computed independently of the schedules.
Matrix expected_r(EstimatorKind kind, const EstimatorParams& p, std::size_t k) {
  const std::size_t n = p.r0.rows();
  switch (kind) {
    case EstimatorKind::classical: return p.r0;
    case EstimatorKind::fr:
    case EstimatorKind::tvr_general:
      if (k == 0) return p.r0;
      if (p.k_cut && k >= *p.k_cut) return Matrix(n, n);
      return p.r0 * std::pow(p.mu, static_cast<double>(k));
    case EstimatorKind::r1fr:
      return r1fr_closed_form(R1FRParams::make(p.r0, p.mu, p.j_cut), k);
  }
  return Matrix();
}

TEST(Batch, ScalarAndLimits) {
  const RegDelta reg = constant_reg0(Matrix{{1.0}}, Vector{0.0});
  const std::vector<MeasurementTriple> h{scalar_measurement(1, 2)};
  EXPECT_DOUBLE_EQ(batch_solve(h, reg)[0], 1.0);

  const RegDelta reg2 = constant_reg0(Matrix::identity(3), Vector{1, 2, 3});
  EXPECT_EQ(batch_solve({}, reg2), (Vector{1, 2, 3}));

  std::mt19937_64 g(31);
  const Vector theta = testing::random_vector(3, g);
  std::vector<MeasurementTriple> data;
  for (int i = 0; i < 3; ++i) {
    MeasurementTriple m = random_measurement(3, 2, g);
    m.y = m.phi * std::span<const double>(theta);
    data.push_back(m);
  }
  const RegDelta zero = constant_reg0(Matrix(3, 3), Vector(3, 0.0));
  EXPECT_LE(max_abs(sub(batch_solve(data, zero), theta)), 1e-9);
}

TEST(Batch, RejectsUnderdeterminedProblem) {
  const RegDelta zero = constant_reg0(Matrix(2, 2), Vector(2, 0.0));
  const std::vector<MeasurementTriple> h{MeasurementTriple{Matrix{{1, 0}}, Vector{1}, Matrix{{1}}}};
  try {
    batch_solve(h, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_positive_definite);
  }
}

TEST(TvrInit, ScalarAndDegenerate) {
  const RegDelta reg = constant_reg0(Matrix{{1.0}}, Vector{0.0});
  const EstimatorState s = tvr_init(reg, scalar_measurement(1, 2));
  EXPECT_DOUBLE_EQ(s.p_info(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.theta[0], 1.0);

  const RegDelta reg2 = constant_reg0(Matrix::identity(2), Vector{0.5, -1});
  const MeasurementTriple no_data{Matrix(1, 2), Vector{3}, Matrix{{1}}};
  EXPECT_EQ(tvr_init(reg2, no_data).theta, (Vector{0.5, -1}));
  const MeasurementTriple consistent{Matrix{{1, 2}}, Vector{0.5 - 2}, Matrix{{1}}};
  EXPECT_LE(max_abs(sub(tvr_init(reg2, consistent).theta, Vector{0.5, -1})), 1e-15);
}

TEST(RlsMil, ScalarChain) {
  EstimatorState s;
  s.form = Form::covariance;
  s.theta = {1.0};
  s.p_cov = Matrix{{0.5}};
  s.k = 1;
  s.prev_reg = constant_reg0(Matrix{{1.0}}, Vector{0.0});
  const EstimatorState t = rls_mil_update(s, scalar_measurement(1, 2));
  EXPECT_NEAR(t.p_cov(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.theta[0], 4.0 / 3.0, 1e-15);

  const EstimatorState u = rls_mil_update(t, scalar_measurement(0, 5));
  EXPECT_EQ(u.theta, t.theta);
  EXPECT_EQ(u.p_cov, t.p_cov);
}

TEST(Updates, ConstantScheduleReductions) {
  std::mt19937_64 g(32);
  const std::size_t n = 5;
  const Matrix r0 = testing::random_spd(n, g);
  const Vector theta_reg = testing::random_vector(n, g);
  const RegDelta reg0 = constant_reg0(r0, theta_reg);
  RegDelta zero = reg0;
  zero.kind = DeltaKind::zero;
  zero.full = Matrix();
  const MeasurementTriple m0 = random_measurement(n, 2, g);
  EstimatorState info = tvr_init(reg0, m0);
  EstimatorState cov = rls_mil_update(covariance_prior(reg0), m0);
  EstimatorState r1 = r1fr_update(covariance_prior(reg0), zero, m0);
  for (std::size_t k = 1; k <= 100; ++k) {
    const MeasurementTriple m = random_measurement(n, 2, g);
    info = tvr_update(info, zero, m);
    cov = rls_mil_update(cov, m);
    r1 = r1fr_update(r1, zero, m);
    EXPECT_LE(max_abs(sub(info.theta, cov.theta)), 1e-9);
    EXPECT_EQ(r1.theta, cov.theta);
  }
}

class OracleEquivalence : public ::testing::TestWithParam<EstimatorKind> {};

TEST_P(OracleEquivalence, MatchesBatchAtEveryStep) {
  const EstimatorKind kind = GetParam();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 g(1000 + seed);
    const std::size_t n = 1 + seed % 8;
    const std::size_t p = 1 + seed % 3;
    EstimatorParams params;
    params.r0 = testing::random_spd(n, g, 1.0);
    params.theta_reg = testing::random_vector(n, g);
    params.mu = 0.9;
    params.k_cut = n + 5;
    params.j_cut = 1;
    auto est = make_estimator(kind, params);
    std::vector<MeasurementTriple> h;
    for (std::size_t k = 0; k < 50; ++k) {
      h.push_back(random_measurement(n, p, g));
      est->update(h.back());
      const Eigen::VectorXd batch =
          batch_oracle(h, h.size(), expected_r(kind, params, k), params.theta_reg);
      EXPECT_LE(testing::max_diff(batch, est->theta()), 1e-8 * (1 + batch.norm()))
          << "seed " << seed << " step " << k;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, OracleEquivalence,
                         ::testing::Values(EstimatorKind::classical, EstimatorKind::fr,
                                           EstimatorKind::r1fr, EstimatorKind::tvr_general),
                         [](const auto& info) {
                           std::string s = to_string(info.param);
                           for (char& c : s) c = c == '-' ? '_' : c;
                           return s;
                         });

TEST(FadingRls, InformationCovarianceDuality) {
  std::mt19937_64 g(33);
  const std::size_t n = 6;
  EstimatorParams params{testing::random_spd(n, g), Vector(n, 0.0), 0.9, 10, 1};
  auto fr = make_estimator(EstimatorKind::fr, params);
  Matrix p_info = params.r0;
  for (std::size_t k = 0; k < 30; ++k) {
    const MeasurementTriple m = random_measurement(n, 2, g);
    fr->update(m);
    // Independent information matrix: R_k + sum phi^T G phi.
    p_info += transpose_times(m.phi, m.gamma * m.phi);
    const Matrix r_k = expected_r(EstimatorKind::fr, params, k);
    const Matrix info = p_info + r_k - params.r0;
    EXPECT_LE(max_abs_diff(info * fr->covariance(), Matrix::identity(n)), 1e-8);
  }
  EXPECT_EQ(fr->state().form, Form::covariance);
}

TEST(FiniteTime, ExactAfterCutoff) {
  std::mt19937_64 g(34);
  const std::size_t n = 6;
  const Vector theta = testing::random_vector(n, g);
  EstimatorParams params{Matrix::identity(n) * 10.0, Vector(n, 0.0), 0.95, 8, 1};
  for (auto kind : {EstimatorKind::fr, EstimatorKind::r1fr, EstimatorKind::tvr_general}) {
    auto est = make_estimator(kind, params);
    const std::size_t cutoff = kind == EstimatorKind::r1fr ? 2 * n : 8;
    for (std::size_t k = 0; k < 40; ++k) {
      MeasurementTriple m = random_measurement(n, 2, g);
      m.y = m.phi * std::span<const double>(theta);
      est->update(m);
      if (k >= cutoff) EXPECT_LE(norm(sub(est->theta(), theta)), 1e-9) << to_string(kind) << k;
    }
  }
}

TEST(Errors, ConditionViolationCarriesStep) {
  // Regularization removed before the data has full rank.
  EstimatorParams params{Matrix::identity(3), Vector(3, 0.0), 0.5, 2, 0};
  auto fr = make_estimator(EstimatorKind::fr, params);
  const MeasurementTriple m{Matrix{{1, 0, 0}}, Vector{1}, Matrix{{1}}};
  fr->update(m);
  fr->update(m);
  try {
    fr->update(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_positive_definite);
    ASSERT_TRUE(e.step());
    EXPECT_EQ(*e.step(), 2u);
  }

  auto r1 = make_estimator(EstimatorKind::r1fr, params);
  EXPECT_THROW(
      {
        for (int k = 0; k < 3; ++k) r1->update(m);
      },
      Error);
}

TEST(Errors, DimensionMismatch) {
  EstimatorParams params{Matrix::identity(3), Vector(3, 0.0), 0.5, 2, 0};
  auto est = make_estimator(EstimatorKind::classical, params);
  try {
    est->update(MeasurementTriple{Matrix{{1, 0}}, Vector{1}, Matrix{{1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension_mismatch);
  }
}

TEST(MakeEstimator, KindsLabelsAndConfigErrors) {
  EstimatorParams params{Matrix::identity(2), Vector(2, 0.0), 0.99, 201, 1};
  EXPECT_EQ(make_estimator(EstimatorKind::classical, params)->kind(), EstimatorKind::classical);
  EXPECT_STREQ(label(EstimatorKind::classical), "RLS");
  EXPECT_STREQ(label(EstimatorKind::fr), "FR-RLS");
  EXPECT_STREQ(label(EstimatorKind::r1fr), "R1FR-RLS");
  EXPECT_EQ(estimator_kind_from_string("tvr-general"), EstimatorKind::tvr_general);
  EXPECT_FALSE(estimator_kind_from_string("kalman"));

  EstimatorParams bad = params;
  bad.mu = 1.5;
  try {
    make_estimator(EstimatorKind::fr, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
  bad = params;
  bad.r0 = Matrix{{1, 0}, {0, -1}};
  EXPECT_THROW(make_estimator(EstimatorKind::r1fr, bad), Error);
}

}  // namespace
}  // namespace tvrls
