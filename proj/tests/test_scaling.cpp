#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>

#include <omp.h>

#include "test_support.hpp"
#include "tvrls/estimators.hpp"

namespace tvrls {
namespace {

// Median fading-phase step time in ms.
double fading_step_ms(EstimatorKind kind, std::size_t n) {
  std::mt19937_64 g(n);
  EstimatorParams params{Matrix::identity(n), Vector(n, 0.0), 0.99, std::nullopt, std::nullopt};
  auto est = make_estimator(kind, params);
  const std::size_t steps = kind == EstimatorKind::tvr_general ? 25 : 120;
  std::vector<double> times;
  for (std::size_t k = 0; k < steps; ++k) {
    const MeasurementTriple m = testing::random_measurement(n, 2, g);
    const auto t0 = std::chrono::steady_clock::now();
    est->update(m);
    const auto t1 = std::chrono::steady_clock::now();
    if (k >= 5) times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
  return times[times.size() / 2];
}

TEST(Scaling, Rank1FadingIsQuadratic) {
  omp_set_num_threads(1);
  const double ratio = fading_step_ms(EstimatorKind::r1fr, 400) / fading_step_ms(EstimatorKind::r1fr, 200);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 6.0);
}

TEST(Scaling, GeneralUpdateIsCubic) {
  omp_set_num_threads(1);
  const double ratio =
      fading_step_ms(EstimatorKind::tvr_general, 400) / fading_step_ms(EstimatorKind::tvr_general, 200);
  EXPECT_GE(ratio, 5.5);
  EXPECT_LE(ratio, 12.0);
}

}  // namespace
}  // namespace tvrls
