#pragma once

#include <vector>

#include "lossdyn/high_loss.hpp"
#include "lossdyn/system.hpp"

namespace lossdyn {

enum class FrequencyKind { Nonresonant, Resonant };

/// Classification of a drive frequency against the low-loss limit
/// frequencies rho_j; the admittance is analytic at beta = infinity exactly
/// for nonresonant frequencies.
struct FrequencyClass {
    double omega = 0.0;
    FrequencyKind kind = FrequencyKind::Nonresonant;
    double nearest_rho = 0.0;
    double distance = 0.0;
    double tolerance = 0.0;
};

FrequencyClass classify_frequency(double omega, const std::vector<LowLossMode>& low_modes);

enum class AdmittanceRoute { SchurFactored, DirectFallback };

/// Exact admittance i [omega I - A(beta)]^-1 with the route that produced it.
struct AdmittanceResult {
    ComplexMatrix value;
    AdmittanceRoute route = AdmittanceRoute::SchurFactored;
    double xi1_condition = 1.0;
};

AdmittanceResult admittance_exact(const DissipativeSystem& system, double omega, double beta);

/// Large-beta expansion of the admittance: leading term (zero on the loss
/// block, i Xi1^-1 on the no-loss block) plus the 1/beta coefficient
/// w_minus1, a Hermitian PSD operator of rank n_b whose kernel is spanned by
/// the columns of kernel_basis. All matrices are in the ambient frame.
struct AdmittanceExpansion {
    ComplexMatrix leading;
    ComplexMatrix w_minus1;
    ComplexMatrix kernel_basis;  // n x (n - n_b), orthonormal-ish unit columns
};

AdmittanceExpansion admittance_expansion(const BlockDecomposition& decomp, double omega);

enum class ForcingRegime { InsideLossSubspace, HasNoLossComponent };

/// Stationary response to the harmonic force f e^{-i omega t}.
struct ResponseReport {
    ComplexVector amplitude;
    double stored_energy = 0.0;
    double dissipated_power = 0.0;
    double quality_factor = 0.0;
    bool quality_finite = true;
    ForcingRegime regime = ForcingRegime::HasNoLossComponent;
    AdmittanceRoute route = AdmittanceRoute::SchurFactored;
};

ResponseReport respond(const DissipativeSystem& system, const ComplexVector& f, double omega,
                       double beta);

enum class LimitQClass { Zero, Infinite };

/// beta -> infinity limits of the stored energy, dissipated power and the
/// quality-factor class for a fixed forcing.
struct ResponseLimits {
    double stored_energy = 0.0;
    double dissipated_power = 0.0;
    LimitQClass q_class = LimitQClass::Zero;
};

ResponseLimits response_limits(const BlockDecomposition& decomp, const ComplexVector& f,
                               double omega);

/// For a forcing inside the loss subspace, verifies the chain of lower
/// bounds linking the leading stored-energy coefficient, the leading
/// dissipation coefficient scaled by the largest loss eigenvalue, and the
/// forcing norm. Throws InequalityViolated if the chain fails.
bool check_stored_energy_bounds(const BlockDecomposition& decomp, const ComplexVector& f,
                                double omega);

} // namespace lossdyn
