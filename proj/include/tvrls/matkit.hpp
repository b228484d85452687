#pragma once

// Dense symmetric linear algebra used by every estimator: Cholesky
// factor/solve, SPD inversion, the matrix inversion lemma, the quadratic
// minimizer, and a cyclic Jacobi eigensolver.

#include <cstddef>
#include <span>

#include "tvrls/matrix.hpp"

namespace tvrls {

/// Lower-triangular Cholesky factor L with A = L * L^T.
struct CholFactor {
  Matrix lower;

  std::size_t dim() const noexcept { return lower.rows(); }
};

/// Eigenvalues sorted descending; eigenvectors stored as the matching
/// columns of `vectors`.
struct EigenPair {
  Vector values;
  Matrix vectors;

  Vector vector(std::size_t i) const { return vectors.col(i); }
};

struct Extremes {
  double min = 0.0;
  double max = 0.0;
};

/// Pivot threshold used by chol_factor: 1e-12 * (1 + largest diagonal entry).
double pd_tolerance(const Matrix& a);

CholFactor chol_factor(const Matrix& a);
Matrix chol_solve(const CholFactor& f, const Matrix& b);
Vector chol_solve(const CholFactor& f, std::span<const double> b);

/// Inverse of a symmetric positive definite matrix, explicitly symmetrized.
Matrix spd_inverse(const Matrix& a);

/// Inverse of a small general matrix by LU with partial pivoting. Throws
/// SingularInnerMatrix when a pivot vanishes relative to the matrix scale.
Matrix small_inverse(const Matrix& a);

/// (A + U C V)^{-1} from A^{-1}:
///   A^{-1} - A^{-1} U (C^{-1} + V A^{-1} U)^{-1} V A^{-1}
Matrix mil_update(const Matrix& a_inv, const Matrix& u, const Matrix& c, const Matrix& v);

/// Same identity with C^{-1} supplied directly, for callers that already
/// hold the inverse weight (block-diagonal weights never need a dense solve).
Matrix mil_update_with_inverse_weight(const Matrix& a_inv, const Matrix& u,
                                      const Matrix& c_inv, const Matrix& v);

/// argmin_x x^T A x + 2 b^T x = -A^{-1} b for positive definite A.
Vector quad_minimizer(const Matrix& a, std::span<const double> b);

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Stops when the
/// off-diagonal Frobenius norm falls to 1e-12 * ||A||_F; NoConvergence after
/// 100 sweeps. With want_vectors = false, `vectors` is left empty.
EigenPair sym_eigen(const Matrix& a, bool want_vectors = true);

Extremes lambda_extreme(const Matrix& a);

}  // namespace tvrls
