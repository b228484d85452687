#include "tvrls/kernels.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tvrls/error.hpp"

namespace tvrls::kernels {

namespace {

using Index = std::ptrdiff_t;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::dimension_mismatch, what);
}

bool parallel_for(std::size_t n) { return n >= parallel_threshold; }

// Dot products of one row against up to kMaxRows rows at once. Each
// accumulator is an independent chain, which hides add latency when the
// regressor has only a few rows.
constexpr std::size_t kMaxRows = 8;

}  // namespace

Vector mat_vec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "mat_vec: dimension mismatch");
  const Index n = static_cast<Index>(a.rows());
  const std::size_t m = a.cols();
  Vector y(a.rows());
#pragma omp parallel for schedule(static) if (parallel_for(a.rows()))
  for (Index i = 0; i < n; ++i) {
    const double* row = a.data() + static_cast<std::size_t>(i) * m;
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += row[j] * x[j];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply: inner dimensions differ");
  const Index n = static_cast<Index>(a.rows());
  const std::size_t inner = a.cols();
  const std::size_t m = b.cols();
  Matrix c(a.rows(), m);
#pragma omp parallel for schedule(static) if (parallel_for(a.rows()))
  for (Index i = 0; i < n; ++i) {
    double* crow = c.data() + static_cast<std::size_t>(i) * m;
    const double* arow = a.data() + static_cast<std::size_t>(i) * inner;
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = arow[k];
      const double* brow = b.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix multiply_abt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "multiply_abt: column counts differ");
  const Index n = static_cast<Index>(a.rows());
  const std::size_t len = a.cols();
  const std::size_t q = b.rows();
  Matrix c(a.rows(), q);
#pragma omp parallel for schedule(static) if (parallel_for(a.rows()))
  for (Index i = 0; i < n; ++i) {
    const double* arow = a.data() + static_cast<std::size_t>(i) * len;
    double* crow = c.data() + static_cast<std::size_t>(i) * q;
    for (std::size_t c0 = 0; c0 < q; c0 += kMaxRows) {
      const std::size_t cn = std::min(kMaxRows, q - c0);
      std::array<double, kMaxRows> acc{};
      for (std::size_t j = 0; j < len; ++j) {
        const double aij = arow[j];
        for (std::size_t r = 0; r < cn; ++r) acc[r] += aij * b(c0 + r, j);
      }
      for (std::size_t r = 0; r < cn; ++r) crow[c0 + r] = acc[r];
    }
  }
  return c;
}

void sym_low_rank_update(Matrix& p, const Matrix& u, const Matrix& w, double alpha) {
  require(p.is_square() && u.rows() == p.rows() && w.rows() == p.rows() &&
              u.cols() == w.cols(),
          "sym_low_rank_update: dimension mismatch");
  const std::size_t dim = p.rows();
  const std::size_t q = u.cols();
  const Matrix wt = w.transposed();  // q x n, rows contiguous in j
  const Index n = static_cast<Index>(dim);
#pragma omp parallel for schedule(dynamic, 16) if (parallel_for(dim))
  for (Index ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> s(i + 1, 0.0);
    for (std::size_t c = 0; c < q; ++c) {
      const double uic = u(i, c);
      const double* wrow = wt.data() + c * dim;
      for (std::size_t j = 0; j <= i; ++j) s[j] += uic * wrow[j];
    }
    double* prow = p.data() + i * dim;
    for (std::size_t j = 0; j <= i; ++j) prow[j] += alpha * s[j];
    for (std::size_t j = 0; j < i; ++j) p(j, i) = prow[j];
  }
}

void add_weighted_gram(Matrix& a, const Matrix& phi, const Matrix& gamma) {
  require(a.is_square() && phi.cols() == a.rows() && gamma.is_square() &&
              gamma.rows() == phi.rows(),
          "add_weighted_gram: dimension mismatch");
  const std::size_t dim = a.rows();
  const std::size_t p = phi.rows();
  const Matrix t = multiply(gamma, phi);  // p x n
  const Index n = static_cast<Index>(dim);
#pragma omp parallel for schedule(dynamic, 16) if (parallel_for(dim))
  for (Index ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> s(i + 1, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
      const double pci = phi(c, i);
      const double* trow = t.data() + c * dim;
      for (std::size_t j = 0; j <= i; ++j) s[j] += pci * trow[j];
    }
    double* arow = a.data() + i * dim;
    for (std::size_t j = 0; j <= i; ++j) arow[j] += s[j];
    for (std::size_t j = 0; j < i; ++j) a(j, i) = arow[j];
  }
}

void add_scaled_outer(Matrix& a, double alpha, std::span<const double> v) {
  require(a.is_square() && a.rows() == v.size(), "add_scaled_outer: dimension mismatch");
  const std::size_t dim = a.rows();
  const Index n = static_cast<Index>(dim);
#pragma omp parallel for schedule(static) if (parallel_for(dim))
  for (Index ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double vi = v[i];
    double* arow = a.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) arow[j] += alpha * (vi * v[j]);
  }
}

std::size_t cholesky_lower(Matrix& a, double pivot_tol) {
  require(a.is_square(), "cholesky_lower: not square");
  const std::size_t dim = a.rows();
  for (std::size_t j = 0; j < dim; ++j) {
    const double* lj = a.data() + j * dim;
    double s = 0.0;
    for (std::size_t k = 0; k < j; ++k) s += lj[k] * lj[k];
    const double pivot = a(j, j) - s;
    if (!(pivot > pivot_tol)) return j;
    const double ljj = std::sqrt(pivot);
    a(j, j) = ljj;
    const Index first = static_cast<Index>(j + 1);
    const Index last = static_cast<Index>(dim);
#pragma omp parallel for schedule(static) if (parallel_for(dim - j))
    for (Index ii = first; ii < last; ++ii) {
      double* li = a.data() + static_cast<std::size_t>(ii) * dim;
      double t = 0.0;
      for (std::size_t k = 0; k < j; ++k) t += li[k] * lj[k];
      li[j] = (li[j] - t) / ljj;
    }
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) a(i, j) = 0.0;
  return npos;
}

void solve_lower(const Matrix& l, Matrix& b) {
  require(l.is_square() && l.rows() == b.rows(), "solve_lower: dimension mismatch");
  const std::size_t dim = l.rows();
  const std::size_t m = b.cols();
  // Columns of B are independent systems; split them across threads.
  const Index cols = static_cast<Index>(m);
#pragma omp parallel for schedule(static) if (parallel_for(m) && parallel_for(dim))
  for (Index cc = 0; cc < cols; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    for (std::size_t i = 0; i < dim; ++i) {
      const double* li = l.data() + i * dim;
      double s = 0.0;
      for (std::size_t k = 0; k < i; ++k) s += li[k] * b(k, c);
      b(i, c) = (b(i, c) - s) / li[i];
    }
  }
}

void solve_lower_transposed(const Matrix& l, Matrix& b) {
  require(l.is_square() && l.rows() == b.rows(),
          "solve_lower_transposed: dimension mismatch");
  const std::size_t dim = l.rows();
  const std::size_t m = b.cols();
  const Index cols = static_cast<Index>(m);
#pragma omp parallel for schedule(static) if (parallel_for(m) && parallel_for(dim))
  for (Index cc = 0; cc < cols; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    for (std::size_t ii = dim; ii-- > 0;) {
      double s = 0.0;
      for (std::size_t k = ii + 1; k < dim; ++k) s += l(k, ii) * b(k, c);
      b(ii, c) = (b(ii, c) - s) / l(ii, ii);
    }
  }
}

void solve_lower(const Matrix& l, std::span<double> b) {
  require(l.is_square() && l.rows() == b.size(), "solve_lower: dimension mismatch");
  const std::size_t dim = l.rows();
  for (std::size_t i = 0; i < dim; ++i) {
    const double* li = l.data() + i * dim;
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += li[k] * b[k];
    b[i] = (b[i] - s) / li[i];
  }
}

void solve_lower_transposed(const Matrix& l, std::span<double> b) {
  require(l.is_square() && l.rows() == b.size(),
          "solve_lower_transposed: dimension mismatch");
  const std::size_t dim = l.rows();
  // Column-oriented sweep keeps the access to L row-contiguous.
  for (std::size_t ii = dim; ii-- > 0;) {
    b[ii] /= l(ii, ii);
    const double bi = b[ii];
    const double* li = l.data() + ii * dim;
    for (std::size_t k = 0; k < ii; ++k) b[k] -= li[k] * bi;
  }
}

}  // namespace tvrls::kernels
