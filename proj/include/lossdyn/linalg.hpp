#pragma once

#include <Eigen/Dense>
#include <complex>

#include "lossdyn/errors.hpp"

namespace lossdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Result of an eigendecomposition. Eigenvector columns are normalized and,
/// for determinism, phase-fixed so the entry of largest magnitude is real
/// positive. `condition_estimate` is the 2-norm condition number of the
/// eigenvector matrix (1 for Hermitian input).
struct EigenDecomposition {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;
    bool is_diagonalizable = true;
    double condition_estimate = 1.0;
};

/// Condition number above which a matrix of eigenvectors is treated as
/// numerically defective.
inline constexpr double kDiagonalizableCondLimit = 1e12;

bool is_finite(const ComplexMatrix& m);
double hermitian_deviation(const ComplexMatrix& m);

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending, real;
/// eigenvector columns orthonormal.
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

/// Eigendecomposition of a general square matrix. Eigenvalues sorted by
/// (Re, Im) lexicographically. `is_diagonalizable` is false when the
/// eigenvector matrix condition exceeds kDiagonalizableCondLimit; the
/// eigenvalues are still valid in that case.
EigenDecomposition general_eig(const ComplexMatrix& m);

/// Positive square root of a Hermitian positive-definite matrix.
/// 2x2 inputs use the closed form S = (sqrt(det M) I + M) / sqrt(tr M + 2 sqrt(det M));
/// larger inputs go through the spectral decomposition.
ComplexMatrix positive_sqrt(const ComplexMatrix& m);

/// Schur complement S - R P^-1 Q of the leading k x k block P in
/// M = [[P, Q], [R, S]].
ComplexMatrix schur_complement(const ComplexMatrix& m, Eigen::Index k);

/// Inverse of M assembled through the block factorization
/// M^-1 = [[I, -P^-1 Q],[0, I]] diag(P^-1, S_P^-1) [[I, 0],[-R P^-1, I]].
ComplexMatrix aitken_block_inverse(const ComplexMatrix& m, Eigen::Index k);

} // namespace lossdyn
