#pragma once

#include <random>

#include "lossdyn/circuit.hpp"
#include "lossdyn/system.hpp"

namespace lossdyn::testing {

inline double rel_error(const ComplexMatrix& got, const ComplexMatrix& want) {
    return (got - want).norm() / std::max(want.norm(), 1e-300);
}

inline ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(dist(rng), dist(rng));
        }
    }
    return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937& rng) {
    ComplexMatrix x = random_complex(n, n, rng);
    return 0.5 * (x + x.adjoint());
}

inline ComplexMatrix random_unitary(Eigen::Index n, std::mt19937& rng) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(n, n, rng));
    ComplexMatrix q = qr.householderQ();
    return q;
}

// Random system with b of exact rank n_b and loss eigenvalues in [0.5, 2].
inline DissipativeSystem random_system(Eigen::Index n, Eigen::Index n_b, std::mt19937& rng) {
    ComplexMatrix omega = random_hermitian(n, rng);
    ComplexMatrix v = random_unitary(n, rng);
    std::uniform_real_distribution<double> loss(0.5, 2.0);
    ComplexVector eigs = ComplexVector::Zero(n);
    for (Eigen::Index i = 0; i < n_b; ++i) eigs(i) = loss(rng);
    ComplexMatrix b = v * eigs.asDiagonal() * v.adjoint();
    return build_system(omega, 0.5 * (b + b.adjoint()));
}

inline DissipativeSystem circuit_system(double beta = 1.0) {
    return canonical_system(with_loss_beta(reference_circuit(), beta)).system;
}

} // namespace lossdyn::testing
