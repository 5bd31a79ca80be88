#pragma once

#include <vector>

#include "lossdyn/system.hpp"

namespace lossdyn {

/// Large-beta asymptotic data of one high-loss eigenmode:
/// zeta(beta) = -i*zeta_ring*beta + rho + O(1/beta).
struct HighLossMode {
    int index = 0;              // 1-based, 1..n_b
    double zeta_ring = 0.0;     // positive eigenvalue of B2
    double rho = 0.0;           // (w_ring, omega w_ring)
    ComplexVector w_ring;       // unit vector in ran B (ambient frame)
    int degenerate_group = -1;  // >= 0 when B2 had a repeated eigenvalue
};

/// Large-beta asymptotic data of one low-loss eigenmode:
/// zeta(beta) = rho - i*d/beta + O(1/beta^2).
struct LowLossMode {
    int index = 0;              // 1-based, n_b+1..n
    double rho = 0.0;           // eigenvalue of omega1
    double d = 0.0;             // (w_ring, theta* b2^-1 theta w_ring), >= 0
    ComplexVector w_ring;       // unit vector in ker B (ambient frame)
    int degenerate_group = -1;  // >= 0 when omega1 had a repeated eigenvalue
};

/// Per-mode diagnostics for the structural zero-coupling tests.
struct DegeneracyDiagnostic {
    int index = 0;
    double rho = 0.0;
    double d = 0.0;
    bool in_omega_eigenspace = false;  // w_ring in ker(rho I - omega)
    bool in_ker_omega = false;         // w_ring in ker omega
};

/// Modes ordered by descending zeta_ring. Within a repeated B2 eigenvalue the
/// vectors additionally diagonalize the compressed frequency operator.
std::vector<HighLossMode> high_loss_coefficients(const BlockDecomposition& decomp,
                                                 const ComplexMatrix& omega);

/// Modes ordered by ascending rho, ties by d. Within a repeated omega1
/// eigenvalue the vectors additionally diagonalize theta* b2^-1 theta and the
/// d values are its eigenvalues.
std::vector<LowLossMode> low_loss_coefficients(const BlockDecomposition& decomp);

Complex eval_eigenvalue_asymptote(const HighLossMode& mode, double beta);
Complex eval_eigenvalue_asymptote(const LowLossMode& mode, double beta);

/// Returns the asymptotic quality factor; finite flag mirrors ModeMetrics.
struct QualityAsymptote {
    double value = 0.0;
    bool finite = true;
};
QualityAsymptote quality_factor_asymptote(const HighLossMode& mode, double beta);
QualityAsymptote quality_factor_asymptote(const LowLossMode& mode, double beta);

double dissipation_asymptote(const HighLossMode& mode, double beta);
double dissipation_asymptote(const LowLossMode& mode, double beta);

/// Checks, per low-loss mode, that membership of w_ring in the omega
/// eigenspace for rho is equivalent to d = 0, and that w_ring lies in
/// ker omega exactly when rho = 0 and d = 0. Throws EquivalenceViolated if
/// either equivalence fails beyond tolerance.
std::vector<DegeneracyDiagnostic> degeneracy_report(const std::vector<LowLossMode>& modes,
                                                    const ComplexMatrix& omega);

} // namespace lossdyn
