#include "lossdyn/circuit.hpp"

#include <cmath>

namespace lossdyn {

void validate(const CircuitSpec& spec, bool require_loss) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(std::string("circuit parameter ") + name + " must be a positive number");
        }
    };
    positive(spec.c1, "c1");
    positive(spec.c2, "c2");
    positive(spec.c12, "c12");
    positive(spec.l1, "l1");
    positive(spec.l2, "l2");
    positive(spec.tau, "tau");
    if (spec.r2 && spec.beta) {
        throw ConfigError("circuit accepts r2 or beta, not both");
    }
    if (require_loss) {
        if (!spec.r2 && !spec.beta) {
            throw ConfigError("circuit needs r2 or beta");
        }
        double v = spec.r2 ? *spec.r2 : *spec.beta;
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("circuit loss parameter must be a nonnegative number");
        }
    }
}

double loss_beta(const CircuitSpec& spec) {
    validate(spec, /*require_loss=*/true);
    if (spec.beta) return *spec.beta;
    return *spec.r2 * spec.tau / spec.l2;
}

LagrangianMatrices lagrangian_matrices(const CircuitSpec& spec) {
    validate(spec, /*require_loss=*/true);
    LagrangianMatrices out;
    out.l = RealMatrix::Zero(2, 2);
    out.l(0, 0) = spec.l1;
    out.l(1, 1) = spec.l2;
    out.g = RealMatrix(2, 2);
    out.g(0, 0) = 1.0 / spec.c1 + 1.0 / spec.c12;
    out.g(0, 1) = -1.0 / spec.c12;
    out.g(1, 0) = -1.0 / spec.c12;
    out.g(1, 1) = 1.0 / spec.c2 + 1.0 / spec.c12;
    double r2 = spec.r2 ? *spec.r2 : spec.l2 * (*spec.beta) / spec.tau;
    out.r = RealMatrix::Zero(2, 2);
    out.r(1, 1) = r2;
    if (out.g.determinant() <= 0.0 || out.g(0, 0) <= 0.0) {
        throw NotPositiveDefinite("lagrangian_matrices: stiffness matrix is not positive definite");
    }
    return out;
}

PhiPair build_phi(const CircuitSpec& spec) {
    validate(spec, /*require_loss=*/false);
    PhiPair out;
    out.phi_squared = RealMatrix(2, 2);
    out.phi_squared(0, 0) = (1.0 / spec.c1 + 1.0 / spec.c12) / spec.l1;
    out.phi_squared(0, 1) = -1.0 / (std::sqrt(spec.l1) * std::sqrt(spec.l2) * spec.c12);
    out.phi_squared(1, 0) = out.phi_squared(0, 1);
    out.phi_squared(1, 1) = (1.0 / spec.c2 + 1.0 / spec.c12) / spec.l2;

    ComplexMatrix phi_c = positive_sqrt(out.phi_squared.cast<Complex>());
    out.phi = phi_c.real();
    if (!(out.phi(0, 0) > 0.0) || !(out.phi(1, 1) > 0.0)) {
        throw NotPositiveDefinite("build_phi: diagonal of the square root must be positive");
    }
    if (std::abs(out.phi(0, 1)) <= 1e-14) {
        throw PhiOffDiagonalZero("build_phi: loops are uncoupled (off-diagonal of phi vanishes)");
    }
    return out;
}

CanonicalCircuit canonical_system(const CircuitSpec& spec) {
    double beta = loss_beta(spec);
    PhiPair phi = build_phi(spec);

    ComplexMatrix omega = ComplexMatrix::Zero(4, 4);
    omega.topRightCorner(2, 2) = Complex(0.0, -1.0) * phi.phi.cast<Complex>();
    omega.bottomLeftCorner(2, 2) = Complex(0.0, 1.0) * phi.phi.cast<Complex>();

    ComplexMatrix b = ComplexMatrix::Zero(4, 4);
    b(1, 1) = 1.0 / spec.tau;

    CanonicalCircuit out;
    out.system = build_system(omega, b);
    out.beta = beta;
    out.r2 = spec.r2 ? *spec.r2 : spec.l2 * beta / spec.tau;
    out.tau = spec.tau;
    out.phi = std::move(phi);
    return out;
}

CircuitSpec reference_circuit() {
    CircuitSpec spec;
    spec.c1 = 2.0;
    spec.c2 = 3.0;
    spec.c12 = 4.0;
    spec.l1 = 5.0;
    spec.l2 = 6.0;
    spec.tau = 1.0;
    return spec;
}

CircuitSpec with_loss_beta(CircuitSpec spec, double beta) {
    spec.r2.reset();
    spec.beta = beta;
    return spec;
}

CircuitSpec with_resistance(CircuitSpec spec, double r2) {
    spec.beta.reset();
    spec.r2 = r2;
    return spec;
}

} // namespace lossdyn
