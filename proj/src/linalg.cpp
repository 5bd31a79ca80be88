#include "lossdyn/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lossdyn {

namespace {

void require_square_finite(const ComplexMatrix& m, const char* op) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw NonFinite(std::string(op) + ": matrix must be square and nonempty");
    }
    if (!is_finite(m)) {
        throw NonFinite(std::string(op) + ": matrix has NaN or Inf entries");
    }
}

// Multiplies each column by a unit phase so its largest-magnitude entry is
// real positive. Makes eigenvector output reproducible across runs.
void fix_column_phases(ComplexMatrix& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            double a = std::abs(v(i, j));
            if (a > best + 1e-15) {
                best = a;
                imax = i;
            }
        }
        Complex pivot = v(imax, j);
        if (std::abs(pivot) > 0) {
            v.col(j) *= std::conj(pivot) / std::abs(pivot);
        }
    }
}

double svd_condition(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    double smax = svd.singularValues()(0);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

} // namespace

bool is_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

double hermitian_deviation(const ComplexMatrix& m) {
    return (m - m.adjoint()).norm();
}

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    require_square_finite(m, "hermitian_eig");
    double scale = m.norm();
    if (hermitian_deviation(m) > 1e-12 * std::max(scale, 1e-300)) {
        throw NonHermitianInput("hermitian_eig: input deviates from M = M* beyond tolerance");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
    EigenDecomposition out;
    out.eigenvalues = es.eigenvalues().cast<Complex>();
    out.eigenvectors = es.eigenvectors();
    fix_column_phases(out.eigenvectors);
    out.is_diagonalizable = true;
    out.condition_estimate = 1.0;
    return out;
}

EigenDecomposition general_eig(const ComplexMatrix& m) {
    require_square_finite(m, "general_eig");
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/true);
    const Eigen::Index n = m.rows();

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto& vals = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
        return vals(a).imag() < vals(b).imag();
    });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.eigenvalues(j) = vals(order[static_cast<size_t>(j)]);
        out.eigenvectors.col(j) = es.eigenvectors().col(order[static_cast<size_t>(j)]).normalized();
    }
    fix_column_phases(out.eigenvectors);
    out.condition_estimate = svd_condition(out.eigenvectors);
    out.is_diagonalizable =
        std::isfinite(out.condition_estimate) && out.condition_estimate < kDiagonalizableCondLimit;
    return out;
}

ComplexMatrix positive_sqrt(const ComplexMatrix& m) {
    require_square_finite(m, "positive_sqrt");
    double scale = m.norm();
    if (hermitian_deviation(m) > 1e-12 * std::max(scale, 1e-300)) {
        throw NonHermitianInput("positive_sqrt: input is not Hermitian");
    }
    const double tol_psd = 1e-12 * scale;

    if (m.rows() == 2) {
        // Closed form via Cayley-Hamilton: S = (sqrt(det M) I + M) / sqrt(tr M + 2 sqrt(det M)).
        double tr = m.trace().real();
        double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
        if (det <= 0.0 || tr <= 0.0) {
            throw NotPositiveDefinite("positive_sqrt: 2x2 input is not positive definite");
        }
        double sqrt_det = std::sqrt(det);
        double denom = std::sqrt(tr + 2.0 * sqrt_det);
        // tr - 2 sqrt(det) = (l1 - l2)^2 / denom^2 >= 0; min eigenvalue check:
        double min_eig = 0.5 * (tr - std::sqrt(std::max(tr * tr - 4.0 * det, 0.0)));
        if (min_eig <= tol_psd) {
            throw NotPositiveDefinite("positive_sqrt: 2x2 minimum eigenvalue below tolerance");
        }
        ComplexMatrix s = (sqrt_det * ComplexMatrix::Identity(2, 2) + m) / denom;
        return s;
    }

    EigenDecomposition ed = hermitian_eig(m);
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
        if (ed.eigenvalues(i).real() <= tol_psd) {
            throw NotPositiveDefinite("positive_sqrt: minimum eigenvalue below tolerance");
        }
    }
    ComplexVector roots = ed.eigenvalues.unaryExpr(
        [](Complex z) { return Complex(std::sqrt(z.real()), 0.0); });
    ComplexMatrix s = ed.eigenvectors * roots.asDiagonal() * ed.eigenvectors.adjoint();
    return 0.5 * (s + s.adjoint());
}

ComplexMatrix schur_complement(const ComplexMatrix& m, Eigen::Index k) {
    require_square_finite(m, "schur_complement");
    const Eigen::Index n = m.rows();
    if (k <= 0 || k >= n) {
        throw SingularBlock("schur_complement: split index must satisfy 0 < k < n");
    }
    ComplexMatrix p = m.topLeftCorner(k, k);
    if (svd_condition(p) >= kDiagonalizableCondLimit) {
        throw SingularBlock("schur_complement: leading block is numerically singular");
    }
    ComplexMatrix q = m.topRightCorner(k, n - k);
    ComplexMatrix r = m.bottomLeftCorner(n - k, k);
    ComplexMatrix s = m.bottomRightCorner(n - k, n - k);
    Eigen::PartialPivLU<ComplexMatrix> lu(p);
    return s - r * lu.solve(q);
}

ComplexMatrix aitken_block_inverse(const ComplexMatrix& m, Eigen::Index k) {
    require_square_finite(m, "aitken_block_inverse");
    const Eigen::Index n = m.rows();
    if (k <= 0 || k >= n) {
        throw SingularBlock("aitken_block_inverse: split index must satisfy 0 < k < n");
    }
    ComplexMatrix p = m.topLeftCorner(k, k);
    if (svd_condition(p) >= kDiagonalizableCondLimit) {
        throw SingularBlock("aitken_block_inverse: leading block is numerically singular");
    }
    Eigen::PartialPivLU<ComplexMatrix> lu_p(p);
    ComplexMatrix q = m.topRightCorner(k, n - k);
    ComplexMatrix r = m.bottomLeftCorner(n - k, k);
    ComplexMatrix s = m.bottomRightCorner(n - k, n - k);

    ComplexMatrix sp = s - r * lu_p.solve(q);
    if (svd_condition(sp) >= kDiagonalizableCondLimit) {
        throw SingularSchurComplement("aitken_block_inverse: Schur complement is numerically singular");
    }
    Eigen::PartialPivLU<ComplexMatrix> lu_sp(sp);

    ComplexMatrix left = ComplexMatrix::Identity(n, n);
    left.topRightCorner(k, n - k) = -lu_p.solve(q);
    ComplexMatrix mid = ComplexMatrix::Zero(n, n);
    mid.topLeftCorner(k, k) = lu_p.inverse();
    mid.bottomRightCorner(n - k, n - k) = lu_sp.inverse();
    ComplexMatrix right = ComplexMatrix::Identity(n, n);
    right.bottomLeftCorner(n - k, k) = -(r * lu_p.inverse());

    return left * mid * right;
}

} // namespace lossdyn
