#include "tvrls/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tvrls/error.hpp"
#include "tvrls/kernels.hpp"

namespace tvrls {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kJacobiTol = 1e-12;

void require_symmetric(const Matrix& a, const char* op) {
  if (!a.is_square()) {
    throw Error(ErrorKind::dimension_mismatch, std::string(op) + ": matrix is not square");
  }
  if (!is_symmetric(a, 1e-10 * (1.0 + max_abs(a)))) {
    throw Error(ErrorKind::not_symmetric, std::string(op) + ": matrix is not symmetric");
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

double pd_tolerance(const Matrix& a) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) max_diag = std::max(max_diag, a(i, i));
  return 1e-12 * (1.0 + max_diag);
}

CholFactor chol_factor(const Matrix& a) {
  require_symmetric(a, "chol_factor");
  Matrix l = a;
  const std::size_t bad = kernels::cholesky_lower(l, pd_tolerance(a));
  if (bad != kernels::npos) {
    throw Error(ErrorKind::not_positive_definite,
                "chol_factor: pivot " + std::to_string(bad) + " is not positive");
  }
  return CholFactor{std::move(l)};
}

Matrix chol_solve(const CholFactor& f, const Matrix& b) {
  if (b.rows() != f.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "chol_solve: right-hand side has wrong row count");
  }
  Matrix x = b;
  kernels::solve_lower(f.lower, x);
  kernels::solve_lower_transposed(f.lower, x);
  return x;
}

Vector chol_solve(const CholFactor& f, std::span<const double> b) {
  if (b.size() != f.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "chol_solve: right-hand side has wrong length");
  }
  Vector x(b.begin(), b.end());
  kernels::solve_lower(f.lower, std::span<double>(x));
  kernels::solve_lower_transposed(f.lower, std::span<double>(x));
  return x;
}

Matrix spd_inverse(const Matrix& a) {
  const CholFactor f = chol_factor(a);
  Matrix inv = chol_solve(f, Matrix::identity(a.rows()));
  symmetrize(inv);
  return inv;
}

Matrix small_inverse(const Matrix& a) {
  if (!a.is_square()) throw Error(ErrorKind::dimension_mismatch, "small_inverse: not square");
  const std::size_t n = a.rows();
  Matrix lu = a;
  Matrix inv = Matrix::identity(n);
  const double scale = std::max(1.0, max_abs(a));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
    if (std::abs(lu(piv, col)) <= 1e-13 * scale) {
      throw Error(ErrorKind::singular_inner_matrix, "inner matrix is singular");
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(lu(piv, j), lu(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    const double d = lu(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      lu(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = lu(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        lu(r, j) -= f * lu(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

Matrix mil_update_with_inverse_weight(const Matrix& a_inv, const Matrix& u,
                                      const Matrix& c_inv, const Matrix& v) {
  const std::size_t n = a_inv.rows();
  const std::size_t q = c_inv.rows();
  if (!a_inv.is_square() || !c_inv.is_square() || u.rows() != n || u.cols() != q ||
      v.rows() != q || v.cols() != n) {
    throw Error(ErrorKind::dimension_mismatch, "mil_update: inconsistent shapes");
  }
  const Matrix a_inv_u = a_inv * u;  // n x q
  const Matrix v_a_inv = v * a_inv;  // q x n
  Matrix inner = c_inv + v * a_inv_u;
  const Matrix inner_inv = small_inverse(inner);
  return a_inv - a_inv_u * (inner_inv * v_a_inv);
}

Matrix mil_update(const Matrix& a_inv, const Matrix& u, const Matrix& c, const Matrix& v) {
  if (!c.is_square()) throw Error(ErrorKind::dimension_mismatch, "mil_update: C not square");
  return mil_update_with_inverse_weight(a_inv, u, small_inverse(c), v);
}

Vector quad_minimizer(const Matrix& a, std::span<const double> b) {
  if (b.size() != a.rows()) {
    throw Error(ErrorKind::dimension_mismatch, "quad_minimizer: length mismatch");
  }
  const CholFactor f = chol_factor(a);
  Vector neg_b(b.begin(), b.end());
  for (double& x : neg_b) x = -x;
  return chol_solve(f, std::span<const double>(neg_b));
}

EigenPair sym_eigen(const Matrix& input, bool want_vectors) {
  require_symmetric(input, "sym_eigen");
  const std::size_t n = input.rows();
  Matrix a = symmetrized(input);
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix();
  const double tol = kJacobiTol * frobenius_norm(a);

  int sweep = 0;
  while (off_diagonal_norm(a) > tol) {
    if (++sweep > kMaxSweeps) {
      throw Error(ErrorKind::no_convergence, "sym_eigen: no convergence after 100 sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Rows p and q of J^T A, then columns p and q of (J^T A) J.
        double* rp = a.data() + p * n;
        double* rq = a.data() + q * n;
        for (std::size_t k = 0; k < n; ++k) {
          const double x = rp[k];
          const double y = rq[k];
          rp[k] = c * x - s * y;
          rq[k] = s * x + c * y;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double x = a(k, p);
          const double y = a(k, q);
          a(k, p) = c * x - s * y;
          a(k, q) = s * x + c * y;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double x = v(k, p);
            const double y = v(k, q);
            v(k, p) = c * x - s * y;
            v(k, q) = s * x + c * y;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenPair out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(order[i], order[i]);
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t col = 0; col < n; ++col)
      for (std::size_t k = 0; k < n; ++k) out.vectors(k, col) = v(k, order[col]);
  }
  return out;
}

Extremes lambda_extreme(const Matrix& a) {
  if (a.empty()) throw Error(ErrorKind::dimension_mismatch, "lambda_extreme: empty matrix");
  const EigenPair e = sym_eigen(a, false);
  return Extremes{e.values.back(), e.values.front()};
}

}  // namespace tvrls
