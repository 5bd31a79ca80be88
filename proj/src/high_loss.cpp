#include "lossdyn/high_loss.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lossdyn {

namespace {

// Groups consecutive eigenvalues closer than tol and, within each group,
// rotates the eigenvectors so they also diagonalize the compression of
// `refiner`. Returns the per-column group id (-1 for simple eigenvalues) and
// the refined quadratic-form values (w, refiner w).
struct Refined {
    ComplexMatrix vectors;
    std::vector<double> form_values;
    std::vector<int> group;
};

Refined refine_degenerate(const ComplexVector& values, const ComplexMatrix& vectors,
                          const ComplexMatrix& refiner, double tol) {
    const Eigen::Index n = vectors.cols();
    Refined out;
    out.vectors = vectors;
    out.form_values.resize(static_cast<size_t>(n));
    out.group.assign(static_cast<size_t>(n), -1);

    int group_id = 0;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && std::abs(values(end).real() - values(start).real()) <= tol) ++end;
        if (end - start > 1) {
            ComplexMatrix sub = vectors.middleCols(start, end - start);
            ComplexMatrix compressed = sub.adjoint() * refiner * sub;
            EigenDecomposition ec = hermitian_eig(compressed);
            out.vectors.middleCols(start, end - start) = sub * ec.eigenvectors;
            for (Eigen::Index j = start; j < end; ++j) {
                out.form_values[static_cast<size_t>(j)] = ec.eigenvalues(j - start).real();
                out.group[static_cast<size_t>(j)] = group_id;
            }
            ++group_id;
        } else {
            ComplexVector w = vectors.col(start);
            out.form_values[static_cast<size_t>(start)] = (w.dot(refiner * w)).real();
        }
        start = end;
    }
    return out;
}

} // namespace

std::vector<HighLossMode> high_loss_coefficients(const BlockDecomposition& decomp,
                                                 const ComplexMatrix& omega) {
    const Eigen::Index nb = decomp.n_b;
    EigenDecomposition eb2 = hermitian_eig(decomp.b2);

    // Lift B2 eigenvectors into the ambient space.
    ComplexMatrix lifted(decomp.basis.rows(), nb);
    for (Eigen::Index j = 0; j < nb; ++j) {
        lifted.col(j) = decomp.basis.leftCols(nb) * eb2.eigenvectors.col(j);
    }
    double tol = 1e-10 * std::max(decomp.b2.norm(), 1.0);
    Refined r = refine_degenerate(eb2.eigenvalues, lifted, omega, tol);

    std::vector<HighLossMode> modes(static_cast<size_t>(nb));
    for (Eigen::Index j = 0; j < nb; ++j) {
        auto& m = modes[static_cast<size_t>(j)];
        m.zeta_ring = eb2.eigenvalues(j).real();
        m.rho = r.form_values[static_cast<size_t>(j)];
        m.w_ring = r.vectors.col(j);
        m.degenerate_group = r.group[static_cast<size_t>(j)];
    }
    // Descending zeta_ring, ties by ascending rho.
    std::stable_sort(modes.begin(), modes.end(), [](const HighLossMode& a, const HighLossMode& b) {
        if (a.zeta_ring != b.zeta_ring) return a.zeta_ring > b.zeta_ring;
        return a.rho < b.rho;
    });
    for (size_t j = 0; j < modes.size(); ++j) modes[j].index = static_cast<int>(j) + 1;
    return modes;
}

std::vector<LowLossMode> low_loss_coefficients(const BlockDecomposition& decomp) {
    const Eigen::Index nb = decomp.n_b;
    const Eigen::Index nk = decomp.omega1.rows();

    EigenDecomposition eo1 = hermitian_eig(decomp.omega1);

    Eigen::PartialPivLU<ComplexMatrix> lu_b2(decomp.b2);
    ComplexMatrix coupling = decomp.theta.adjoint() * lu_b2.solve(decomp.theta);
    coupling = 0.5 * (coupling + coupling.adjoint());
    // Zero threshold: relative to the coupling operator, floored at the
    // roundoff the congruence-transformed theta can inject.
    double omega_scale =
        decomp.omega1.norm() + decomp.omega2.norm() + decomp.theta.norm();
    double eps = std::numeric_limits<double>::epsilon();
    double roundoff_floor =
        100.0 * lu_b2.inverse().norm() * std::pow(eps * omega_scale, 2);
    double d_zero_tol = std::max(1e-12 * coupling.norm(), roundoff_floor);

    double tol = 1e-10 * std::max(decomp.omega1.norm(), 1.0);
    Refined r = refine_degenerate(eo1.eigenvalues, eo1.eigenvectors, coupling, tol);

    std::vector<LowLossMode> modes(static_cast<size_t>(nk));
    for (Eigen::Index j = 0; j < nk; ++j) {
        auto& m = modes[static_cast<size_t>(j)];
        m.rho = eo1.eigenvalues(j).real();
        double d = r.form_values[static_cast<size_t>(j)];
        m.d = (d > d_zero_tol) ? d : 0.0;
        m.w_ring = decomp.basis.rightCols(nk) * r.vectors.col(j);
        m.degenerate_group = r.group[static_cast<size_t>(j)];
    }
    std::stable_sort(modes.begin(), modes.end(), [](const LowLossMode& a, const LowLossMode& b) {
        if (a.rho != b.rho) return a.rho < b.rho;
        return a.d < b.d;
    });
    for (size_t j = 0; j < modes.size(); ++j) {
        modes[j].index = static_cast<int>(nb) + static_cast<int>(j) + 1;
    }
    return modes;
}

Complex eval_eigenvalue_asymptote(const HighLossMode& mode, double beta) {
    return Complex(mode.rho, -mode.zeta_ring * beta);
}

Complex eval_eigenvalue_asymptote(const LowLossMode& mode, double beta) {
    return Complex(mode.rho, -mode.d / beta);
}

QualityAsymptote quality_factor_asymptote(const HighLossMode& mode, double beta) {
    return {0.5 * std::abs(mode.rho) / (mode.zeta_ring * beta), true};
}

QualityAsymptote quality_factor_asymptote(const LowLossMode& mode, double beta) {
    if (mode.d <= 0.0) {
        return {std::numeric_limits<double>::infinity(), false};
    }
    return {0.5 * std::abs(mode.rho) / mode.d * beta, true};
}

double dissipation_asymptote(const HighLossMode& mode, double beta) {
    return mode.zeta_ring * beta;
}

double dissipation_asymptote(const LowLossMode& mode, double beta) {
    return mode.d / beta;
}

std::vector<DegeneracyDiagnostic> degeneracy_report(const std::vector<LowLossMode>& modes,
                                                    const ComplexMatrix& omega) {
    std::vector<DegeneracyDiagnostic> out;
    out.reserve(modes.size());
    for (const auto& m : modes) {
        DegeneracyDiagnostic diag;
        diag.index = m.index;
        diag.rho = m.rho;
        diag.d = m.d;
        diag.in_omega_eigenspace = ((m.rho * m.w_ring) - (omega * m.w_ring)).norm() <= 1e-10;
        diag.in_ker_omega = (omega * m.w_ring).norm() <= 1e-10;

        bool d_zero = std::abs(m.d) <= 1e-10;
        if (diag.in_omega_eigenspace != d_zero) {
            throw EquivalenceViolated(
                "degeneracy_report: eigenspace membership and d = 0 disagree for mode " +
                std::to_string(m.index));
        }
        bool rho_zero = std::abs(m.rho) <= 1e-10;
        if (diag.in_ker_omega != (rho_zero && d_zero)) {
            throw EquivalenceViolated(
                "degeneracy_report: ker-omega membership and (rho, d) = 0 disagree for mode " +
                std::to_string(m.index));
        }
        out.push_back(diag);
    }
    return out;
}

} // namespace lossdyn
