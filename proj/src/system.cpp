#include "lossdyn/system.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace lossdyn {

namespace {

double norm_or_tiny(const ComplexMatrix& m) {
    return std::max(m.norm(), 1e-300);
}

} // namespace

DissipativeSystem build_system(const ComplexMatrix& omega, const ComplexMatrix& b) {
    if (omega.rows() != omega.cols() || b.rows() != b.cols() || omega.rows() != b.rows() ||
        omega.rows() == 0) {
        throw NonFinite("build_system: omega and b must be square with equal dimension");
    }
    if (!is_finite(omega) || !is_finite(b)) {
        throw NonFinite("build_system: matrices must have finite entries");
    }
    if (hermitian_deviation(omega) > 1e-12 * norm_or_tiny(omega)) {
        throw NonHermitianOmega("build_system: omega is not Hermitian within tolerance");
    }
    if (hermitian_deviation(b) > 1e-12 * norm_or_tiny(b)) {
        throw BNotPSD("build_system: b is not Hermitian within tolerance");
    }

    EigenDecomposition eb = hermitian_eig(b);
    const double b_norm = norm_or_tiny(b);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < eb.eigenvalues.size(); ++i) {
        double lambda = eb.eigenvalues(i).real();
        if (lambda < -1e-12 * b_norm) {
            throw BNotPSD("build_system: b has a negative eigenvalue beyond tolerance");
        }
        if (lambda > 1e-10 * b_norm) ++rank;
    }
    if (rank == 0 || rank == omega.rows()) {
        throw LossFractionViolated(
            "build_system: rank of b must satisfy 0 < n_b < n (got n_b = " +
            std::to_string(rank) + " of n = " + std::to_string(omega.rows()) + ")");
    }

    DissipativeSystem sys;
    sys.omega = 0.5 * (omega + omega.adjoint());
    sys.b = 0.5 * (b + b.adjoint());
    sys.n = omega.rows();
    sys.n_b = rank;
    return sys;
}

ComplexMatrix assemble(const DissipativeSystem& system, double beta) {
    if (!(beta >= 0.0)) {
        throw PreconditionViolated("assemble: beta must be nonnegative");
    }
    return system.omega - Complex(0.0, beta) * system.b;
}

BlockDecomposition decompose(const DissipativeSystem& system) {
    EigenDecomposition eb = hermitian_eig(system.b);
    const Eigen::Index n = system.n;
    const double b_norm = norm_or_tiny(system.b);

    for (Eigen::Index i = 0; i < n; ++i) {
        double lambda = std::abs(eb.eigenvalues(i).real());
        if (lambda >= 1e-12 * b_norm && lambda <= 1e-8 * b_norm) {
            throw RankDeficiencyAmbiguous(
                "decompose: b has an eigenvalue inside the rank guard band [1e-12, 1e-8]*|b|");
        }
    }

    // Basis ordered by descending eigenvalue of b: loss directions first.
    ComplexMatrix basis(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        basis.col(j) = eb.eigenvectors.col(n - 1 - j);
    }

    const Eigen::Index nb = system.n_b;
    ComplexMatrix omega_t = basis.adjoint() * system.omega * basis;
    ComplexMatrix b_t = basis.adjoint() * system.b * basis;

    BlockDecomposition d;
    d.n_b = nb;
    d.basis = basis;
    d.omega2 = omega_t.topLeftCorner(nb, nb);
    d.theta = omega_t.topRightCorner(nb, n - nb);
    d.omega1 = omega_t.bottomRightCorner(n - nb, n - nb);
    d.b2 = b_t.topLeftCorner(nb, nb);
    d.p_b = basis.leftCols(nb) * basis.leftCols(nb).adjoint();
    d.p_b_perp = ComplexMatrix::Identity(n, n) - d.p_b;
    return d;
}

void reassemble(const BlockDecomposition& d, ComplexMatrix& omega, ComplexMatrix& b) {
    const Eigen::Index n = d.basis.rows();
    const Eigen::Index nb = d.n_b;
    ComplexMatrix omega_t = ComplexMatrix::Zero(n, n);
    omega_t.topLeftCorner(nb, nb) = d.omega2;
    omega_t.topRightCorner(nb, n - nb) = d.theta;
    omega_t.bottomLeftCorner(n - nb, nb) = d.theta.adjoint();
    omega_t.bottomRightCorner(n - nb, n - nb) = d.omega1;
    ComplexMatrix b_t = ComplexMatrix::Zero(n, n);
    b_t.topLeftCorner(nb, nb) = d.b2;
    omega = d.basis * omega_t * d.basis.adjoint();
    b = d.basis * b_t * d.basis.adjoint();
}

ModeMetrics mode_metrics(const DissipativeSystem& system, double beta,
                         const ComplexVector& w, Complex zeta) {
    if (w.size() != system.n || w.norm() == 0.0) {
        throw PreconditionViolated("mode_metrics: w must be a nonzero vector of matching dimension");
    }
    ComplexMatrix a = assemble(system, beta);
    double residual = (a * w - zeta * w).norm();
    if (residual > 1e-8 * norm_or_tiny(a) * w.norm()) {
        throw NotAnEigenpair("mode_metrics: (w, zeta) residual exceeds tolerance");
    }

    double nn = w.squaredNorm();
    double re_check = (w.dot(system.omega * w)).real() / nn;
    double im_check = -beta * (w.dot(system.b * w)).real() / nn;
    double scale = std::max(std::abs(zeta), 1.0);
    if (std::abs(re_check - zeta.real()) > 1e-8 * scale ||
        std::abs(im_check - zeta.imag()) > 1e-8 * scale) {
        throw NotAnEigenpair("mode_metrics: eigenvalue inconsistent with quadratic forms of w");
    }

    ModeMetrics out;
    out.eigenvalue = zeta;
    out.energy = 0.5 * nn;
    out.dissipated_power = beta * (w.dot(system.b * w)).real();
    double tol_q = 1e-12 * std::abs(zeta);
    if (zeta.imag() < -tol_q) {
        out.quality_factor = -0.5 * std::abs(zeta.real()) / zeta.imag();
        out.quality_finite = true;
    } else {
        out.quality_factor = std::numeric_limits<double>::infinity();
        out.quality_finite = false;
    }
    return out;
}

MassCanonicalization canonicalize_mass(const ComplexMatrix& m, const ComplexMatrix& a) {
    if (m.rows() != m.cols() || a.rows() != a.cols() || m.rows() != a.rows()) {
        throw NonFinite("canonicalize_mass: m and a must be square with equal dimension");
    }
    if (hermitian_deviation(a) > 1e-12 * norm_or_tiny(a)) {
        throw NonHermitianInput("canonicalize_mass: a is not Hermitian");
    }
    EigenDecomposition em = hermitian_eig(m);
    double m_norm = norm_or_tiny(m);
    for (Eigen::Index i = 0; i < em.eigenvalues.size(); ++i) {
        if (em.eigenvalues(i).real() <= 1e-12 * m_norm) {
            throw NotPositiveDefinite("canonicalize_mass: m is not positive definite");
        }
    }
    ComplexVector inv_roots = em.eigenvalues.unaryExpr(
        [](Complex z) { return Complex(1.0 / std::sqrt(z.real()), 0.0); });
    ComplexVector roots = em.eigenvalues.unaryExpr(
        [](Complex z) { return Complex(std::sqrt(z.real()), 0.0); });
    ComplexMatrix m_inv_half = em.eigenvectors * inv_roots.asDiagonal() * em.eigenvectors.adjoint();

    MassCanonicalization out;
    out.omega = m_inv_half * a * m_inv_half;
    out.omega = 0.5 * (out.omega + out.omega.adjoint());
    out.transform = em.eigenvectors * roots.asDiagonal() * em.eigenvectors.adjoint();
    return out;
}

OrbitSubspace orbit_subspace(const DissipativeSystem& system) {
    BlockDecomposition d = decompose(system);
    const Eigen::Index n = system.n;

    // Seed with an orthonormal basis of ran B, then grow by applying omega.
    std::vector<ComplexVector> cols;
    for (Eigen::Index j = 0; j < d.n_b; ++j) {
        cols.push_back(d.basis.col(j));
    }

    bool grew = true;
    while (grew && static_cast<Eigen::Index>(cols.size()) < n) {
        grew = false;
        size_t current = cols.size();
        for (size_t j = 0; j < current; ++j) {
            ComplexVector v = system.omega * cols[j];
            double original = v.norm();
            for (const auto& c : cols) {
                v -= c.dot(v) * c;
            }
            // Re-orthogonalize once; classic Gram-Schmidt alone loses accuracy.
            for (const auto& c : cols) {
                v -= c.dot(v) * c;
            }
            if (v.norm() > 1e-10 * std::max(original, 1.0)) {
                cols.push_back(v.normalized());
                grew = true;
                if (static_cast<Eigen::Index>(cols.size()) == n) break;
            }
        }
    }

    OrbitSubspace out;
    out.dimension = static_cast<Eigen::Index>(cols.size());
    out.basis.resize(n, out.dimension);
    for (Eigen::Index j = 0; j < out.dimension; ++j) {
        out.basis.col(j) = cols[static_cast<size_t>(j)];
    }
    return out;
}

double free_evolution_energy_audit(const DissipativeSystem& system, double beta,
                                   const ComplexVector& v0,
                                   const std::vector<double>& t_grid) {
    if (t_grid.size() < 5) {
        throw PreconditionViolated("free_evolution_energy_audit: need at least 5 grid points");
    }
    for (size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw PreconditionViolated("free_evolution_energy_audit: t_grid must be increasing");
        }
    }
    ComplexMatrix a = assemble(system, beta);
    EigenDecomposition ed = general_eig(a);
    if (!ed.is_diagonalizable) {
        throw NotDiagonalizable("free_evolution_energy_audit: system operator is numerically defective");
    }

    Eigen::PartialPivLU<ComplexMatrix> lu(ed.eigenvectors);
    ComplexVector c = lu.solve(v0);

    const size_t nt = t_grid.size();
    std::vector<double> energy(nt), power(nt);
    for (size_t k = 0; k < nt; ++k) {
        ComplexVector phases = (Complex(0.0, -1.0) * t_grid[k] * ed.eigenvalues).array().exp();
        ComplexVector v = ed.eigenvectors * (phases.cwiseProduct(c));
        energy[k] = 0.5 * v.squaredNorm();
        power[k] = beta * (v.dot(system.b * v)).real();
    }

    // Five-point centered stencil; the grid is required to be smooth enough
    // that treating it as locally uniform is within the audit tolerance.
    double worst = 0.0;
    for (size_t k = 2; k + 2 < nt; ++k) {
        double h = 0.25 * (t_grid[k + 2] - t_grid[k - 2]);
        double du = (-energy[k + 2] + 8.0 * energy[k + 1] - 8.0 * energy[k - 1] + energy[k - 2]) /
                    (12.0 * h);
        double residual = std::abs(du + power[k]) / std::max(1.0, std::abs(power[k]));
        worst = std::max(worst, residual);
    }
    return worst;
}

} // namespace lossdyn
