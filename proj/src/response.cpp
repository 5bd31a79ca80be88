#include "lossdyn/response.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lossdyn {

namespace {

double xi1_condition_estimate(const ComplexMatrix& xi1) {
    Eigen::JacobiSVD<ComplexMatrix> svd(xi1);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    double smax = svd.singularValues()(0);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

FrequencyClass classify_against_rhos(double omega, const std::vector<double>& rhos) {
    FrequencyClass out;
    out.omega = omega;
    double lo = *std::min_element(rhos.begin(), rhos.end());
    double hi = *std::max_element(rhos.begin(), rhos.end());
    out.tolerance = 1e-8 * (1.0 + (hi - lo));
    out.distance = std::numeric_limits<double>::infinity();
    for (double rho : rhos) {
        double dist = std::abs(omega - rho);
        if (dist < out.distance) {
            out.distance = dist;
            out.nearest_rho = rho;
        }
    }
    out.kind = (out.distance <= out.tolerance) ? FrequencyKind::Resonant
                                               : FrequencyKind::Nonresonant;
    return out;
}

std::vector<double> rhos_from_decomposition(const BlockDecomposition& decomp) {
    EigenDecomposition eo1 = hermitian_eig(decomp.omega1);
    std::vector<double> rhos(static_cast<size_t>(eo1.eigenvalues.size()));
    for (Eigen::Index i = 0; i < eo1.eigenvalues.size(); ++i) {
        rhos[static_cast<size_t>(i)] = eo1.eigenvalues(i).real();
    }
    return rhos;
}

void require_nonresonant(const BlockDecomposition& decomp, double omega, const char* op) {
    FrequencyClass fc = classify_against_rhos(omega, rhos_from_decomposition(decomp));
    if (fc.kind == FrequencyKind::Resonant) {
        throw ResonantFrequency(std::string(op) + ": omega is within tolerance of a limit frequency rho");
    }
}

} // namespace

FrequencyClass classify_frequency(double omega, const std::vector<LowLossMode>& low_modes) {
    if (low_modes.empty()) {
        throw PreconditionViolated("classify_frequency: low-loss mode list is empty");
    }
    std::vector<double> rhos;
    rhos.reserve(low_modes.size());
    for (const auto& m : low_modes) rhos.push_back(m.rho);
    return classify_against_rhos(omega, rhos);
}

AdmittanceResult admittance_exact(const DissipativeSystem& system, double omega, double beta) {
    if (!(beta > 0.0)) {
        throw PreconditionViolated("admittance_exact: beta must be positive");
    }
    BlockDecomposition d = decompose(system);
    require_nonresonant(d, omega, "admittance_exact");

    const Eigen::Index n = system.n;
    ComplexMatrix m_ambient = omega * ComplexMatrix::Identity(n, n) - assemble(system, beta);
    ComplexMatrix m_block = d.basis.adjoint() * m_ambient * d.basis;

    AdmittanceResult out;
    out.xi1_condition = xi1_condition_estimate(
        omega * ComplexMatrix::Identity(n - d.n_b, n - d.n_b) - d.omega1);
    try {
        ComplexMatrix inv_block = aitken_block_inverse(m_block, d.n_b);
        out.value = Complex(0.0, 1.0) * (d.basis * inv_block * d.basis.adjoint());
        out.route = AdmittanceRoute::SchurFactored;
    } catch (const Error&) {
        Eigen::PartialPivLU<ComplexMatrix> lu(m_ambient);
        out.value = Complex(0.0, 1.0) * lu.inverse();
        out.route = AdmittanceRoute::DirectFallback;
    }
    return out;
}

AdmittanceExpansion admittance_expansion(const BlockDecomposition& decomp, double omega) {
    require_nonresonant(decomp, omega, "admittance_expansion");

    const Eigen::Index n = decomp.basis.rows();
    const Eigen::Index nb = decomp.n_b;
    const Eigen::Index nk = n - nb;

    ComplexMatrix xi1 = omega * ComplexMatrix::Identity(nk, nk) - decomp.omega1;
    Eigen::PartialPivLU<ComplexMatrix> lu_xi1(xi1);
    ComplexMatrix xi1_inv = lu_xi1.inverse();
    Eigen::PartialPivLU<ComplexMatrix> lu_b2(decomp.b2);
    ComplexMatrix b2_inv = lu_b2.inverse();

    AdmittanceExpansion out;

    ComplexMatrix leading_block = ComplexMatrix::Zero(n, n);
    leading_block.bottomRightCorner(nk, nk) = Complex(0.0, 1.0) * xi1_inv;
    out.leading = decomp.basis * leading_block * decomp.basis.adjoint();

    // Factored form: congruence of diag(b2^-1, 0) by [[I, theta xi1^-1], [0, I]].
    ComplexMatrix cong = ComplexMatrix::Identity(n, n);
    cong.topRightCorner(nb, nk) = decomp.theta * xi1_inv;
    ComplexMatrix core = ComplexMatrix::Zero(n, n);
    core.topLeftCorner(nb, nb) = b2_inv;
    ComplexMatrix w_block = cong.adjoint() * core * cong;
    out.w_minus1 = decomp.basis * w_block * decomp.basis.adjoint();
    out.w_minus1 = 0.5 * (out.w_minus1 + out.w_minus1.adjoint());

    out.kernel_basis.resize(n, nk);
    for (Eigen::Index j = 0; j < nk; ++j) {
        ComplexVector block_vec = ComplexVector::Zero(n);
        block_vec.segment(nb, nk) = ComplexVector::Unit(nk, j);
        block_vec.head(nb) = -decomp.theta * xi1_inv.col(j);
        ComplexVector ambient = decomp.basis * block_vec;
        out.kernel_basis.col(j) = ambient.normalized();
    }
    return out;
}

ResponseReport respond(const DissipativeSystem& system, const ComplexVector& f, double omega,
                       double beta) {
    if (f.size() != system.n || f.norm() == 0.0 || !f.allFinite()) {
        throw PreconditionViolated("respond: f must be a finite nonzero vector of matching dimension");
    }
    BlockDecomposition d = decompose(system);
    require_nonresonant(d, omega, "respond");

    AdmittanceResult adm = admittance_exact(system, omega, beta);
    ResponseReport out;
    out.amplitude = adm.value * f;
    out.route = adm.route;
    out.stored_energy = 0.5 * out.amplitude.squaredNorm();
    out.dissipated_power = beta * (out.amplitude.dot(system.b * out.amplitude)).real();

    double perp_norm = (d.p_b_perp * f).norm();
    out.regime = (perp_norm <= 1e-12 * f.norm()) ? ForcingRegime::InsideLossSubspace
                                                 : ForcingRegime::HasNoLossComponent;

    double noise_floor = 1e-14 * beta * system.b.norm() * out.amplitude.squaredNorm();
    if (out.dissipated_power > noise_floor) {
        out.quality_factor = std::abs(omega) * out.stored_energy / out.dissipated_power;
        out.quality_finite = true;
    } else {
        out.quality_factor = std::numeric_limits<double>::infinity();
        out.quality_finite = false;
    }
    return out;
}

ResponseLimits response_limits(const BlockDecomposition& decomp, const ComplexVector& f,
                               double omega) {
    require_nonresonant(decomp, omega, "response_limits");
    const Eigen::Index n = decomp.basis.rows();
    const Eigen::Index nb = decomp.n_b;
    const Eigen::Index nk = n - nb;

    ComplexVector f_block = decomp.basis.adjoint() * f;
    ComplexVector f_perp = f_block.segment(nb, nk);

    ResponseLimits out;
    out.dissipated_power = 0.0;
    bool has_perp = f_perp.norm() > 1e-12 * std::max(f.norm(), 1e-300);
    if (has_perp) {
        ComplexMatrix xi1 = omega * ComplexMatrix::Identity(nk, nk) - decomp.omega1;
        Eigen::PartialPivLU<ComplexMatrix> lu(xi1);
        out.stored_energy = 0.5 * lu.solve(f_perp).squaredNorm();
    } else {
        out.stored_energy = 0.0;
    }
    out.q_class = (has_perp && std::abs(omega) > 1e-14) ? LimitQClass::Infinite : LimitQClass::Zero;
    return out;
}

bool check_stored_energy_bounds(const BlockDecomposition& decomp, const ComplexVector& f,
                                double omega) {
    const Eigen::Index n = decomp.basis.rows();
    const Eigen::Index nb = decomp.n_b;
    const Eigen::Index nk = n - nb;

    ComplexVector f_block = decomp.basis.adjoint() * f;
    if (f.norm() == 0.0 || f_block.segment(nb, nk).norm() > 1e-12 * f.norm()) {
        throw PreconditionViolated(
            "check_stored_energy_bounds: f must be a nonzero vector inside the loss subspace");
    }
    require_nonresonant(decomp, omega, "check_stored_energy_bounds");
    ComplexVector f2 = f_block.head(nb);

    ComplexMatrix xi1 = omega * ComplexMatrix::Identity(nk, nk) - decomp.omega1;
    Eigen::PartialPivLU<ComplexMatrix> lu_xi1(xi1);
    ComplexMatrix xi1_inv = lu_xi1.inverse();
    Eigen::PartialPivLU<ComplexMatrix> lu_b2(decomp.b2);
    ComplexMatrix b2_inv = lu_b2.inverse();

    ComplexMatrix m22 = b2_inv * b2_inv +
                        b2_inv * decomp.theta * xi1_inv.adjoint() * xi1_inv *
                            decomp.theta.adjoint() * b2_inv;

    double sup_ring = hermitian_eig(decomp.b2).eigenvalues(nb - 1).real();
    double a = 0.5 * (f2.dot(m22 * f2)).real();
    double b = 0.5 / sup_ring * (f2.dot(b2_inv * f2)).real();
    double c = 0.5 / (sup_ring * sup_ring) * f2.squaredNorm();

    double slack = 1e-12 * std::max({1.0, a, b, c});
    if (!(a + slack >= b && b + slack >= c && c > 0.0)) {
        throw InequalityViolated("check_stored_energy_bounds: bound chain failed");
    }
    return true;
}

} // namespace lossdyn
