#pragma once

#include <vector>

#include "lossdyn/linalg.hpp"

namespace lossdyn {

/// A two-component dissipative system: Hermitian frequency operator `omega`
/// and positive-semidefinite dissipation shape `b` with rank 0 < n_b < n.
/// The evolution operator at loss parameter beta is omega - i*beta*b.
struct DissipativeSystem {
    ComplexMatrix omega;
    ComplexMatrix b;
    Eigen::Index n = 0;
    Eigen::Index n_b = 0;

    double loss_fraction() const { return static_cast<double>(n_b) / static_cast<double>(n); }
};

/// Orthogonal split H = H_B (+) H_B^perp with the block operators of omega
/// expressed in a unitary basis whose first n_b columns span ran B.
struct BlockDecomposition {
    ComplexMatrix p_b;       // projection onto ran B (ambient frame)
    ComplexMatrix p_b_perp;  // projection onto ker B
    ComplexMatrix omega2;    // n_b x n_b
    ComplexMatrix omega1;    // (n - n_b) x (n - n_b)
    ComplexMatrix theta;     // n_b x (n - n_b)
    ComplexMatrix b2;        // n_b x n_b, positive definite
    ComplexMatrix basis;     // n x n unitary
    Eigen::Index n_b = 0;
};

/// Energy, dissipated power and quality factor of one eigenmode.
struct ModeMetrics {
    double energy = 0.0;
    double dissipated_power = 0.0;
    double quality_factor = 0.0;
    bool quality_finite = true;
    Complex eigenvalue{};
};

DissipativeSystem build_system(const ComplexMatrix& omega, const ComplexMatrix& b);

/// omega - i*beta*b.
ComplexMatrix assemble(const DissipativeSystem& system, double beta);

BlockDecomposition decompose(const DissipativeSystem& system);

/// Reassembles (omega, b) from the blocks; inverse of decompose.
void reassemble(const BlockDecomposition& d, ComplexMatrix& omega, ComplexMatrix& b);

ModeMetrics mode_metrics(const DissipativeSystem& system, double beta,
                         const ComplexVector& w, Complex zeta);

/// Reduces (m, a) with m > 0 to the unit-mass frame:
/// omega = m^{-1/2} a m^{-1/2}, transform = m^{1/2}.
struct MassCanonicalization {
    ComplexMatrix omega;
    ComplexMatrix transform;
};
MassCanonicalization canonicalize_mass(const ComplexMatrix& m, const ComplexMatrix& a);

/// Smallest omega-invariant subspace containing ran B, grown Krylov-style.
struct OrbitSubspace {
    Eigen::Index dimension = 0;
    ComplexMatrix basis;  // n x dimension, orthonormal columns
};
OrbitSubspace orbit_subspace(const DissipativeSystem& system);

/// Propagates v0 under the free evolution and checks dU/dt = -beta (v, B v)
/// on the grid, with dU/dt from a centered finite-difference stencil.
/// Returns the maximum normalized residual over interior grid points.
double free_evolution_energy_audit(const DissipativeSystem& system, double beta,
                                   const ComplexVector& v0,
                                   const std::vector<double>& t_grid);

} // namespace lossdyn
