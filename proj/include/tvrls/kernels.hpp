#pragma once

// Hot loops behind the estimators. Two implementations share each signature:
//
//   tvrls::kernels::            OpenMP row-parallel versions used by the library
//   tvrls::kernels::reference:: plain serial loops kept as the test oracle and
//                               benchmark baseline
//
// The parallel versions partition rows (or right-hand-side columns) across
// threads and keep the per-element accumulation order of the serial loop, so
// results do not depend on the thread count.

#include <cstddef>
#include <limits>
#include <span>

#include "tvrls/matrix.hpp"

namespace tvrls::kernels {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/// Problems below this dimension never open a parallel region.
inline constexpr std::size_t parallel_threshold = 96;

Vector mat_vec(const Matrix& a, std::span<const double> x);
Matrix multiply(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix multiply_abt(const Matrix& a, const Matrix& b);

/// p += alpha * u * w^T for square p, computed on the lower triangle and
/// mirrored. Only meaningful when u * w^T is symmetric.
void sym_low_rank_update(Matrix& p, const Matrix& u, const Matrix& w, double alpha);

/// a += phi^T * gamma * phi (gamma symmetric p x p, phi p x n).
void add_weighted_gram(Matrix& a, const Matrix& phi, const Matrix& gamma);

/// a += alpha * v * v^T
void add_scaled_outer(Matrix& a, double alpha, std::span<const double> v);

/// In-place Cholesky; on success the lower triangle holds L and the strict
/// upper triangle is zeroed. Returns the index of the first pivot that is
/// <= pivot_tol (before the square root), or npos on success.
std::size_t cholesky_lower(Matrix& a, double pivot_tol);

/// Solves L * X = B in place (B is n x m).
void solve_lower(const Matrix& l, Matrix& b);
/// Solves L^T * X = B in place (B is n x m).
void solve_lower_transposed(const Matrix& l, Matrix& b);

void solve_lower(const Matrix& l, std::span<double> b);
void solve_lower_transposed(const Matrix& l, std::span<double> b);

namespace reference {

Vector mat_vec(const Matrix& a, std::span<const double> x);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_abt(const Matrix& a, const Matrix& b);
void sym_low_rank_update(Matrix& p, const Matrix& u, const Matrix& w, double alpha);
void add_weighted_gram(Matrix& a, const Matrix& phi, const Matrix& gamma);
void add_scaled_outer(Matrix& a, double alpha, std::span<const double> v);
std::size_t cholesky_lower(Matrix& a, double pivot_tol);
void solve_lower(const Matrix& l, Matrix& b);
void solve_lower_transposed(const Matrix& l, Matrix& b);

}  // namespace reference

}  // namespace tvrls::kernels
