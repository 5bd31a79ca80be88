#pragma once

#include <vector>

#include "lossdyn/high_loss.hpp"
#include "lossdyn/system.hpp"

namespace lossdyn {

/// Small-beta asymptotic data of one eigenmode:
/// zeta(beta) = omega_j - i*sigma_j*beta + O(beta^2).
struct SmallBetaMode {
    int index = 0;              // 1-based, 1..n
    double omega_j = 0.0;       // eigenfrequency of omega
    double sigma_j = 0.0;       // (u_j, b u_j), >= 0
    ComplexVector u_j;          // unit eigenvector of omega
    int degenerate_group = -1;  // >= 0 when omega had a repeated eigenvalue
};

/// Modes ordered by ascending omega_j, ties by sigma_j. Within a repeated
/// eigenfrequency the vectors additionally diagonalize the compressed b and
/// the sigma_j are its eigenvalues.
std::vector<SmallBetaMode> small_beta_coefficients(const DissipativeSystem& system);

Complex eval_small_beta_eigenvalue(const SmallBetaMode& mode, double beta);

QualityAsymptote small_beta_quality_asymptote(const SmallBetaMode& mode, double beta,
                                              double sigma_tol = 1e-12);

} // namespace lossdyn
