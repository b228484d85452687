#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tvrls/analysis.hpp"
#include "tvrls/error.hpp"

namespace tvrls {
namespace {

RegDelta constant_reg(const Matrix& r, const Vector& theta_reg) {
  ConstantSchedule s(r, theta_reg);
  return s.step(0);
}

TEST(PropagateError, ContractionWhenRegularizingAtTruth) {
  std::mt19937_64 g(41);
  const std::size_t n = 4;
  const Vector theta = testing::random_vector(n, g);
  const RegDelta reg = constant_reg(Matrix::identity(n), theta);
  const Matrix p_k_inv = testing::random_spd(n, g);
  const Matrix p_k1 = spd_inverse(testing::random_spd(n, g));
  const Vector e = testing::random_vector(n, g);
  const Vector got = propagate_error(e, p_k_inv, p_k1, reg, reg, TrueModel{theta});
  const Vector expect = p_k1 * std::span<const double>(p_k_inv * std::span<const double>(e));
  EXPECT_LE(max_abs(sub(got, expect)), 1e-12);
  const Vector zero = propagate_error(Vector(n, 0.0), p_k_inv, p_k1, reg, reg, TrueModel{theta});
  EXPECT_LE(max_abs(zero), 1e-15);
  EXPECT_THROW(propagate_error(Vector(n + 1, 0.0), p_k_inv, p_k1, reg, reg, TrueModel{theta}),
               Error);
}

TEST(PropagateError, ScalarChainMatchesDirectError) {
  // theta_1 = 1, P_1^{-1} = 2, next measurement phi = 1, y = 2 from theta = 2.
  const RegDelta reg = constant_reg(Matrix{{1.0}}, Vector{0.0});
  const Vector e1{1.0 - 2.0};
  const Vector e2 = propagate_error(e1, Matrix{{2.0}}, Matrix{{1.0 / 3.0}}, reg, reg,
                                    TrueModel{Vector{2.0}});
  EXPECT_NEAR(e2[0], 4.0 / 3.0 - 2.0, 1e-12);
}

TEST(ClosedFormError, ZeroCasesAndBatch) {
  std::mt19937_64 g(42);
  const std::size_t n = 5;
  const Vector theta = testing::random_vector(n, g);
  History h;
  for (int i = 0; i < 4; ++i) {
    MeasurementTriple m = testing::random_measurement(n, 2, g);
    m.y = m.phi * std::span<const double>(theta);
    h.push_back(m);
  }
  EXPECT_LE(max_abs(closed_form_error(h, constant_reg(Matrix(n, n), Vector(n, 0.0)),
                                      TrueModel{theta})),
            1e-15);
  EXPECT_LE(max_abs(closed_form_error(h, constant_reg(Matrix::identity(n), theta),
                                      TrueModel{theta})),
            1e-15);
  const RegDelta reg = constant_reg(testing::random_spd(n, g), testing::random_vector(n, g));
  const Vector direct = sub(batch_solve(h, reg), theta);
  EXPECT_LE(max_abs(sub(closed_form_error(h, reg, TrueModel{theta}), direct)), 1e-10);
}

TEST(AttractivityBound, Examples) {
  const Matrix s = Matrix::identity(2);
  EXPECT_EQ(attractivity_bound(constant_reg(Matrix(2, 2), Vector{0, 0}), s, 0.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(attractivity_bound(constant_reg(Matrix::identity(2), Vector{0, 0}), s, 0.0, 2.0),
                   2.0);
  try {
    attractivity_bound(constant_reg(Matrix::identity(2), Vector{0, 0}), Matrix{{1, 0}, {0, 0}},
                       0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::rank_not_attained);
  }
}

TEST(AttractivityBound, HoldsAlongFadingRun) {
  std::mt19937_64 g(43);
  const std::size_t n = 6;
  const Vector theta = testing::random_vector(n, g);
  EstimatorParams params{Matrix::identity(n) * 5.0, Vector(n, 0.0), 0.9, 15, 1};
  auto est = make_estimator(EstimatorKind::fr, params);
  History h;
  ExcitationMonitor monitor(n);
  for (std::size_t k = 0; k < 30; ++k) {
    MeasurementTriple m = testing::random_measurement(n, 1, g);
    m.y = m.phi * std::span<const double>(theta);
    h.push_back(m);
    monitor.add(m);
    est->update(m);
    if (monitor.k_rank()) {
      const double b = attractivity_bound(lambda_extreme(est->last_reg().current()).max,
                                          monitor.lambda_min_at_k_rank(), 0.0, norm(theta));
      EXPECT_LE(norm(sub(est->theta(), theta)), b + 1e-9);
    }
  }
}

TEST(DetectKRank, Examples) {
  const History h{MeasurementTriple{Matrix{{1, 0}}, Vector{0}, Matrix{{1}}},
                  MeasurementTriple{Matrix{{0, 1}}, Vector{0}, Matrix{{1}}}};
  const KRankResult r = detect_k_rank(h);
  ASSERT_TRUE(r.k_rank);
  EXPECT_EQ(*r.k_rank, 1u);
  EXPECT_EQ(r.lambda_min, (Vector{0, 1}));

  const History none(5, MeasurementTriple{Matrix(2, 3), Vector{0, 0}, Matrix::identity(2)});
  EXPECT_FALSE(detect_k_rank(none).k_rank);
  EXPECT_FALSE(detect_k_rank(History{}).k_rank);
}

TEST(DetectKRank, MonotoneAndMatchesMonitor) {
  std::mt19937_64 g(44);
  History h;
  for (int i = 0; i < 12; ++i) h.push_back(testing::random_measurement(7, 1, g));
  const KRankResult r = detect_k_rank(h);
  ASSERT_TRUE(r.k_rank);
  EXPECT_EQ(*r.k_rank, 6u);
  for (std::size_t i = 1; i < r.lambda_min.size(); ++i) {
    EXPECT_GE(r.lambda_min[i], r.lambda_min[i - 1] - 1e-10);
  }
  ExcitationMonitor m(7, 3);
  std::vector<bool> evaluated;
  for (const auto& x : h) evaluated.push_back(m.add(x).has_value());
  EXPECT_EQ(m.k_rank(), r.k_rank);
  EXPECT_NEAR(m.lambda_min_at_k_rank(), r.lambda_min[6], 1e-12);
  // Every step until rank, then every third.
  EXPECT_EQ(evaluated, (std::vector<bool>{1, 1, 1, 1, 1, 1, 1, 0, 0, 1, 0, 0}));
}

TEST(ExcitationMonitor, DefaultCadence) {
  EXPECT_EQ(ExcitationMonitor(128).cadence(), 1u);
  EXPECT_EQ(ExcitationMonitor(129).cadence(), 10u);
  EXPECT_EQ(ExcitationMonitor(5, 4).cadence(), 4u);
}

}  // namespace
}  // namespace tvrls
