#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "tvrls/estimators.hpp"
#include "tvrls/matrix.hpp"

namespace tvrls::testing {

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r * c; ++i) m.data()[i] = d(g);
  return m;
}

inline Vector random_vector(std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (double& x : v) x = d(g);
  return v;
}

/// B B^T + shift I
inline Matrix random_spd(std::size_t n, std::mt19937_64& g, double shift = 0.5) {
  const Matrix b = random_matrix(n, n, g);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) a(i, j) += b(i, k) * b(j, k);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
  return a;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline double max_diff(const Eigen::MatrixXd& a, const Matrix& b) {
  return (a - to_eigen(b)).cwiseAbs().maxCoeff();
}

inline double max_diff(const Eigen::VectorXd& a, const Vector& b) {
  return (a - to_eigen(b)).cwiseAbs().maxCoeff();
}

/// Random measurement with gamma = G G^T + 0.5 I.
inline MeasurementTriple random_measurement(std::size_t n, std::size_t p, std::mt19937_64& g) {
  MeasurementTriple m;
  m.phi = random_matrix(p, n, g);
  m.y = random_vector(p, g);
  m.gamma = random_spd(p, g);
  return m;
}

/// Eigen batch minimizer (R + sum phi^T G phi)^{-1} (R theta_reg + sum phi^T G y).
inline Eigen::VectorXd batch_oracle(const std::vector<MeasurementTriple>& h, std::size_t count,
                                    const Matrix& r, const Vector& theta_reg) {
  Eigen::MatrixXd a = to_eigen(r);
  Eigen::VectorXd b = to_eigen(r) * to_eigen(theta_reg);
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::MatrixXd phi = to_eigen(h[i].phi);
    const Eigen::MatrixXd gam = to_eigen(h[i].gamma);
    a += phi.transpose() * gam * phi;
    b += phi.transpose() * gam * to_eigen(h[i].y);
  }
  return a.ldlt().solve(b);
}

}  // namespace tvrls::testing
