// Textbook serial loops. Used as the oracle for the parallel kernels and as
// the benchmark baseline; nothing on the estimator path calls these.

#include <cmath>

#include "tvrls/error.hpp"
#include "tvrls/kernels.hpp"

namespace tvrls::kernels::reference {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::dimension_mismatch, what);
}

}  // namespace

Vector mat_vec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "mat_vec: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Matrix multiply_abt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "multiply_abt: column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

void sym_low_rank_update(Matrix& p, const Matrix& u, const Matrix& w, double alpha) {
  require(p.is_square() && u.rows() == p.rows() && w.rows() == p.rows() &&
              u.cols() == w.cols(),
          "sym_low_rank_update: dimension mismatch");
  const Matrix uwt = multiply_abt(u, w);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) p(i, j) += alpha * uwt(i, j);
  symmetrize(p);
}

void add_weighted_gram(Matrix& a, const Matrix& phi, const Matrix& gamma) {
  require(a.is_square() && phi.cols() == a.rows() && gamma.is_square() &&
              gamma.rows() == phi.rows(),
          "add_weighted_gram: dimension mismatch");
  const Matrix g = multiply(multiply(phi.transposed(), gamma), phi);
  a += g;
  symmetrize(a);
}

void add_scaled_outer(Matrix& a, double alpha, std::span<const double> v) {
  require(a.is_square() && a.rows() == v.size(), "add_scaled_outer: dimension mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += alpha * v[i] * v[j];
}

// Cholesky-Banachiewicz, row by row.
std::size_t cholesky_lower(Matrix& a, double pivot_tol) {
  require(a.is_square(), "cholesky_lower: not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < j; ++k) s += l(i, k) * l(j, k);
      if (i == j) {
        const double pivot = a(i, i) - s;
        if (!(pivot > pivot_tol)) return i;
        l(i, i) = std::sqrt(pivot);
      } else {
        l(i, j) = (a(i, j) - s) / l(j, j);
      }
    }
  }
  a = std::move(l);
  return npos;
}

void solve_lower(const Matrix& l, Matrix& b) {
  require(l.is_square() && l.rows() == b.rows(), "solve_lower: dimension mismatch");
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t i = 0; i < l.rows(); ++i) {
      double s = b(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
      b(i, c) = s / l(i, i);
    }
}

void solve_lower_transposed(const Matrix& l, Matrix& b) {
  require(l.is_square() && l.rows() == b.rows(),
          "solve_lower_transposed: dimension mismatch");
  const std::size_t n = l.rows();
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t i = n; i-- > 0;) {
      double s = b(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * b(k, c);
      b(i, c) = s / l(i, i);
    }
}

}  // namespace tvrls::kernels::reference
