#include <doctest.h>

#include <random>

#include "lossdyn/small_beta.hpp"
#include "lossdyn/sweep.hpp"
#include "test_helpers.hpp"

using namespace lossdyn;
using namespace lossdyn::testing;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> grid(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid[static_cast<size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    return grid;
}

std::vector<double> logspace(double lo, double hi, int count) {
    std::vector<double> grid(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid[static_cast<size_t>(i)] = lo * std::pow(hi / lo, double(i) / (count - 1));
    }
    return grid;
}

} // namespace

TEST_CASE("min_cost_assignment on a small known example") {
    Eigen::MatrixXd cost(3, 3);
    cost << 1, 10, 10,
            10, 10, 1,
            10, 1, 10;
    auto perm = min_cost_assignment(cost);
    CHECK(perm[0] == 0);
    CHECK(perm[1] == 2);
    CHECK(perm[2] == 1);
}

TEST_CASE("sweep of a commuting diagonal system yields linear branches") {
    ComplexMatrix omega = ComplexMatrix::Zero(3, 3);
    omega(0, 0) = -1.0;
    omega(1, 1) = 0.5;
    omega(2, 2) = 2.0;
    ComplexMatrix b = ComplexMatrix::Zero(3, 3);
    b(0, 0) = 1.0;
    b(1, 1) = 0.25;
    DissipativeSystem sys = build_system(omega, b);

    auto branches = sweep(sys, linspace(0.0, 5.0, 11));
    REQUIRE(branches.size() == 3);
    for (const auto& br : branches) {
        double w = br.samples.front().second.real();
        // Identify the matching diagonal entry and check zeta = w - i b w.
        int idx = (std::abs(w + 1.0) < 1e-9) ? 0 : (std::abs(w - 0.5) < 1e-9 ? 1 : 2);
        for (const auto& [beta, zeta] : br.samples) {
            Complex want(omega(idx, idx).real(), -b(idx, idx).real() * beta);
            CHECK(std::abs(zeta - want) < 1e-10);
        }
    }
}

TEST_CASE("sweep with a two-point grid still pairs branches correctly") {
    ComplexMatrix omega = ComplexMatrix::Zero(2, 2);
    omega(0, 0) = 1.0;
    omega(1, 1) = 2.0;
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 1.0;
    DissipativeSystem sys = build_system(omega, b);
    auto branches = sweep(sys, {0.0, 5.0});
    REQUIRE(branches.size() == 2);
    for (const auto& br : branches) {
        CHECK(br.samples.size() == 2);
    }
    // The lossy branch starts at 1 and ends at 1 - 5i.
    const auto& lossy = branches[0].samples.front().second.real() == doctest::Approx(1.0)
                             ? branches[0]
                             : branches[1];
    CHECK(std::abs(lossy.samples.back().second - Complex(1.0, -5.0)) < 1e-10);
}

TEST_CASE("branch multiset equals the spectrum at every grid point") {
    std::mt19937 rng(51);
    DissipativeSystem sys = random_system(5, 2, rng);
    auto grid = linspace(0.0, 8.0, 33);
    auto branches = sweep(sys, grid);
    for (size_t k = 0; k < grid.size(); ++k) {
        auto ed = general_eig(assemble(sys, grid[k]));
        std::vector<Complex> from_branches;
        for (const auto& br : branches) from_branches.push_back(br.samples[k].second);
        std::sort(from_branches.begin(), from_branches.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        for (Eigen::Index i = 0; i < 5; ++i) {
            CHECK(std::abs(from_branches[static_cast<size_t>(i)] - ed.eigenvalues(i)) < 1e-10);
        }
    }
}

TEST_CASE("circuit sweep: four branches, one diverging imaginary part") {
    DissipativeSystem sys = circuit_system(1.0);
    auto branches = sweep(sys, linspace(0.0, 10.0, 201));
    REQUIRE(branches.size() == 4);

    BlockDecomposition d = decompose(sys);
    auto high = high_loss_coefficients(d, sys.omega);
    auto low = low_loss_coefficients(d);
    classify(branches, high, low);

    int high_count = 0;
    for (const auto& br : branches) {
        if (br.klass == BranchClass::HighLoss) ++high_count;
    }
    CHECK(high_count == 1);

    // The high-loss branch has by far the most negative imaginary part.
    for (const auto& br : branches) {
        if (br.klass == BranchClass::HighLoss) {
            CHECK(br.samples.back().second.imag() < -5.0);
        } else {
            CHECK(br.samples.back().second.imag() > -1.0);
        }
    }
}

TEST_CASE("classification of the commuting case reduces to b_j > 0") {
    ComplexMatrix omega = ComplexMatrix::Zero(4, 4);
    ComplexMatrix b = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) omega(i, i) = 0.3 * i - 0.5;
    b(0, 0) = 1.0;
    b(2, 2) = 0.5;
    DissipativeSystem sys = build_system(omega, b);
    auto branches = sweep(sys, logspace(0.1, 100.0, 31));
    BlockDecomposition d = decompose(sys);
    classify(branches, high_loss_coefficients(d, sys.omega), low_loss_coefficients(d));
    for (const auto& br : branches) {
        double w0 = br.samples.front().second.real();
        bool lossy = std::abs(w0 - omega(0, 0).real()) < 1e-9 ||
                     std::abs(w0 - omega(2, 2).real()) < 1e-9;
        CHECK((br.klass == BranchClass::HighLoss) == lossy);
    }
}

TEST_CASE("classify requires a long enough sweep") {
    DissipativeSystem sys = circuit_system(1.0);
    auto branches = sweep(sys, linspace(0.0, 1.0, 5));
    BlockDecomposition d = decompose(sys);
    CHECK_THROWS_AS(classify(branches, high_loss_coefficients(d, sys.omega),
                             low_loss_coefficients(d)),
                    PreconditionViolated);
}

TEST_CASE("random systems classify exactly n_b branches as high-loss") {
    std::mt19937 rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Index n = 4 + static_cast<Eigen::Index>(rng() % 3);
        Eigen::Index nb = 1 + static_cast<Eigen::Index>(rng() % static_cast<unsigned>(n - 1));
        DissipativeSystem sys = random_system(n, nb, rng);
        auto branches = sweep(sys, logspace(1.0, 1000.0, 25));
        BlockDecomposition d = decompose(sys);
        classify(branches, high_loss_coefficients(d, sys.omega), low_loss_coefficients(d));
        Eigen::Index high_count = 0;
        for (const auto& br : branches) {
            if (br.klass == BranchClass::HighLoss) ++high_count;
        }
        CHECK(high_count == nb);
    }
}

TEST_CASE("labeled branches obey the dichotomy bounds at the largest beta") {
    std::mt19937 rng(54);
    DissipativeSystem sys = random_system(6, 2, rng);
    BlockDecomposition d = decompose(sys);
    auto high = high_loss_coefficients(d, sys.omega);
    auto low = low_loss_coefficients(d);
    auto branches = sweep(sys, logspace(1.0, 1000.0, 25));
    classify(branches, high, low);

    double beta_max = 1000.0;
    for (const auto& br : branches) {
        Complex z = br.samples.back().second;
        if (br.klass == BranchClass::HighLoss) {
            double ring = high[static_cast<size_t>(br.matched_mode)].zeta_ring;
            CHECK(z.imag() <= -0.5 * ring * beta_max);
        } else {
            double dcoef = low[static_cast<size_t>(br.matched_mode)].d;
            CHECK(std::abs(z.imag()) <= 2.0 * dcoef / beta_max + 1e-8);
        }
    }
}

TEST_CASE("detect_overdamping on trivial systems") {
    // Purely dissipative: overdamped from beta = 0.
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 1.0;
    DissipativeSystem pure = build_system(ComplexMatrix::Zero(2, 2), b);
    auto branches = sweep(pure, linspace(0.0, 4.0, 9));
    detect_overdamping(branches);
    for (const auto& br : branches) {
        REQUIRE(br.overdamped_from.has_value());
        CHECK(*br.overdamped_from == doctest::Approx(0.0));
    }

    // Nonzero constant real parts: never overdamps.
    ComplexMatrix omega = ComplexMatrix::Zero(2, 2);
    omega(0, 0) = 1.0;
    omega(1, 1) = 2.0;
    DissipativeSystem osc = build_system(omega, b);
    branches = sweep(osc, linspace(0.0, 4.0, 9));
    detect_overdamping(branches);
    for (const auto& br : branches) {
        CHECK_FALSE(br.overdamped_from.has_value());
    }
}

TEST_CASE("circuit overdamping interval and critical point") {
    DissipativeSystem sys = circuit_system(1.0);
    auto grid = linspace(0.0, 10.0, 1001);
    auto branches = sweep(sys, grid);
    detect_overdamping(branches);

    std::vector<const SpectralBranch*> overdamped;
    for (const auto& br : branches) {
        if (br.overdamped_from) overdamped.push_back(&br);
    }
    REQUIRE(overdamped.size() == 2);

    // Onset within one grid step of the independently refined critical point.
    CriticalPoint cp = locate_critical_point(sys, 0.3, 1.0);
    for (const auto* br : overdamped) {
        CHECK(std::abs(*br->overdamped_from - cp.beta0) <= 0.011);
    }
    CHECK(std::abs(cp.zeta0.real()) <= 1e-8 * std::abs(cp.zeta0));
    CHECK(cp.zeta0.imag() < 0.0);

    // Frozen oracle value: bisection on the exact characteristic polynomial
    // discriminant gives beta0 = 0.594511908956; the tracked merge must agree.
    CHECK(cp.beta0 == doctest::Approx(0.594511908956).epsilon(1e-8));
}

TEST_CASE("locate_critical_point on the classical damped oscillator") {
    // First-order form of x'' + (beta/tau) x' + phi^2 x = 0 via the 2x2
    // antisymmetric-imaginary frequency block; critical damping at
    // beta = 2 phi tau.
    double phi = 0.8;
    ComplexMatrix omega(2, 2);
    omega << 0.0, Complex(0.0, -phi), Complex(0.0, phi), 0.0;
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 1.0;
    DissipativeSystem sys = build_system(omega, b);
    CriticalPoint cp = locate_critical_point(sys, 1.0, 2.0);
    CHECK(cp.beta0 == doctest::Approx(2.0 * phi).epsilon(1e-8));

    CHECK_THROWS_AS(locate_critical_point(sys, 0.1, 0.5), NoMergeInBracket);
}

TEST_CASE("spectral symmetry of the circuit") {
    DissipativeSystem sys = circuit_system(1.0);
    CHECK(check_spectral_symmetry(sys, {0.1, 1.0, 5.0}) <= 1e-10);

    // Conjugate branch pairing at large beta: the two oscillator branches
    // mirror each other.
    double beta = 50.0;
    auto ed = general_eig(assemble(sys, beta));
    // Eigenvalues sorted by real part: first and last are the mirrored pair.
    Complex lo = ed.eigenvalues(0), hi = ed.eigenvalues(3);
    CHECK(std::abs(hi - (-std::conj(lo))) < 1e-10);
}

TEST_CASE("generic complex system has no mirror symmetry") {
    std::mt19937 rng(53);
    DissipativeSystem sys = random_system(4, 2, rng);
    CHECK(check_spectral_symmetry(sys, {1.0}) > 1e-3);
}

TEST_CASE("overdamping onset is stable under grid refinement") {
    DissipativeSystem sys = circuit_system(1.0);
    auto coarse = sweep(sys, linspace(0.0, 10.0, 101));
    auto fine = sweep(sys, linspace(0.0, 10.0, 1001));
    detect_overdamping(coarse);
    detect_overdamping(fine);
    std::vector<double> coarse_onsets, fine_onsets;
    for (const auto& br : coarse) {
        if (br.overdamped_from) coarse_onsets.push_back(*br.overdamped_from);
    }
    for (const auto& br : fine) {
        if (br.overdamped_from) fine_onsets.push_back(*br.overdamped_from);
    }
    REQUIRE(coarse_onsets.size() == 2);
    REQUIRE(fine_onsets.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(coarse_onsets[i] - fine_onsets[i]) <= 0.1 + 1e-12);
    }
}
