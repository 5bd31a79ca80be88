#include "lossdyn/small_beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lossdyn {

std::vector<SmallBetaMode> small_beta_coefficients(const DissipativeSystem& system) {
    EigenDecomposition eo = hermitian_eig(system.omega);
    const Eigen::Index n = system.n;

    std::vector<SmallBetaMode> modes(static_cast<size_t>(n));
    double tol = 1e-10 * std::max(system.omega.norm(), 1.0);

    int group_id = 0;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n &&
               std::abs(eo.eigenvalues(end).real() - eo.eigenvalues(start).real()) <= tol) {
            ++end;
        }
        if (end - start > 1) {
            ComplexMatrix sub = eo.eigenvectors.middleCols(start, end - start);
            ComplexMatrix compressed = sub.adjoint() * system.b * sub;
            EigenDecomposition ec = hermitian_eig(compressed);
            for (Eigen::Index j = start; j < end; ++j) {
                auto& m = modes[static_cast<size_t>(j)];
                m.omega_j = eo.eigenvalues(j).real();
                m.sigma_j = std::max(ec.eigenvalues(j - start).real(), 0.0);
                m.u_j = sub * ec.eigenvectors.col(j - start);
                m.degenerate_group = group_id;
            }
            ++group_id;
        } else {
            auto& m = modes[static_cast<size_t>(start)];
            m.omega_j = eo.eigenvalues(start).real();
            ComplexVector u = eo.eigenvectors.col(start);
            m.sigma_j = std::max((u.dot(system.b * u)).real(), 0.0);
            m.u_j = u;
        }
        start = end;
    }

    std::stable_sort(modes.begin(), modes.end(), [](const SmallBetaMode& a, const SmallBetaMode& b) {
        if (a.omega_j != b.omega_j) return a.omega_j < b.omega_j;
        return a.sigma_j < b.sigma_j;
    });
    for (size_t j = 0; j < modes.size(); ++j) modes[j].index = static_cast<int>(j) + 1;
    return modes;
}

Complex eval_small_beta_eigenvalue(const SmallBetaMode& mode, double beta) {
    return Complex(mode.omega_j, -mode.sigma_j * beta);
}

QualityAsymptote small_beta_quality_asymptote(const SmallBetaMode& mode, double beta,
                                              double sigma_tol) {
    if (mode.sigma_j <= sigma_tol) {
        return {std::numeric_limits<double>::infinity(), false};
    }
    return {0.5 * std::abs(mode.omega_j) / (mode.sigma_j * beta), true};
}

} // namespace lossdyn
