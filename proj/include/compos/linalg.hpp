#ifndef COMPOS_LINALG_HPP
#define COMPOS_LINALG_HPP

#include <Eigen/Dense>

/**
 * @file linalg.hpp
 * @brief Small dense kernels: centering matrix, symmetric pseudo-inverse, Kronecker product.
 *
 * Everything here targets matrices of dimension up to a few hundred.
 */

namespace compos {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative threshold below which eigenvalues count as zero.
inline constexpr double default_rank_tol = 1e-10;

/// Inputs to symmetric routines may deviate from symmetry by this much, relative to max |M|.
inline constexpr double symmetry_tol = 1e-8;

/// Eigen-pairs of a symmetric matrix, eigenvalues sorted in descending order.
struct EigenDecomposition {
    Vector values;
    Matrix vectors; ///< orthonormal columns, column j pairs with values[j]
};

/// `I - J/dim`. Throws `invalid_dimension` when `dim < 1`.
Matrix centering_matrix(Eigen::Index dim);

/// True when max |M - M'| <= tol * max |M|.
bool is_symmetric(const Matrix& m, double tol = symmetry_tol);

/// Throws `contract_violation` unless `m` is square and symmetric within `symmetry_tol`.
void require_symmetric(const Matrix& m, const char* what);

EigenDecomposition symmetric_eigen(const Matrix& m);

/**
 * Moore-Penrose pseudo-inverse of a symmetric matrix via its eigendecomposition.
 *
 * Eigenvalues with |lambda| <= rank_tol * |lambda_max| are treated as zero.
 * The input is symmetrized before decomposition so the output is exactly symmetric.
 */
Matrix sym_pseudo_inverse(const Matrix& m, double rank_tol = default_rank_tol);

/// Numerical rank under the same threshold rule as `sym_pseudo_inverse`.
Eigen::Index sym_rank(const Matrix& m, double rank_tol = default_rank_tol);

/// Kronecker product; entry (i*rb + j, k*cb + l) = a(i,k) * b(j,l).
Matrix kron(const Matrix& a, const Matrix& b);

} // namespace compos

#endif
