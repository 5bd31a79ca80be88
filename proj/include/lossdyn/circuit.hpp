#pragma once

#include <optional>

#include "lossdyn/system.hpp"

namespace lossdyn {

/// Two-loop circuit: capacitances c1, c2, c12, inductances l1, l2, one
/// resistor r2 in the second loop, and the time unit tau. The loss strength
/// may be given either as the resistance r2 or as the dimensionless beta
/// (r2 = l2 * beta / tau); exactly one of the two.
struct CircuitSpec {
    double c1 = 0.0;
    double c2 = 0.0;
    double c12 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double tau = 1.0;
    std::optional<double> r2;
    std::optional<double> beta;
};

void validate(const CircuitSpec& spec, bool require_loss);

/// Effective dimensionless loss parameter (r2 * tau / l2 when r2 was given).
double loss_beta(const CircuitSpec& spec);

struct LagrangianMatrices {
    RealMatrix l;  // diag(l1, l2)
    RealMatrix g;  // capacitive stiffness, positive definite
    RealMatrix r;  // diag(0, r2)
};
LagrangianMatrices lagrangian_matrices(const CircuitSpec& spec);

struct PhiPair {
    RealMatrix phi_squared;  // l^{-1/2} g l^{-1/2}
    RealMatrix phi;          // its positive square root
};
PhiPair build_phi(const CircuitSpec& spec);

struct CanonicalCircuit {
    DissipativeSystem system;  // n = 4, n_b = 1
    double beta = 0.0;
    double r2 = 0.0;
    double tau = 1.0;
    PhiPair phi;
};
CanonicalCircuit canonical_system(const CircuitSpec& spec);

/// The fixed worked example: c1 = 2, c2 = 3, c12 = 4, l1 = 5, l2 = 6,
/// tau = 1, with the loss parameter left free.
CircuitSpec reference_circuit();

CircuitSpec with_loss_beta(CircuitSpec spec, double beta);
CircuitSpec with_resistance(CircuitSpec spec, double r2);

} // namespace lossdyn
