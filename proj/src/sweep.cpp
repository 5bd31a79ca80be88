#include "lossdyn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lossdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexVector sorted_eigenvalues(const DissipativeSystem& system, double beta) {
    return general_eig(assemble(system, beta)).eigenvalues;
}

double spectral_diameter(const ComplexVector& vals) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        for (Eigen::Index j = i + 1; j < vals.size(); ++j) {
            d = std::max(d, std::abs(vals(i) - vals(j)));
        }
    }
    return d;
}

struct MatchResult {
    std::vector<int> perm;  // slot in `a` -> index in `b`
    bool ambiguous = false;
};

// Permutation matching a_i to b_perm[i] by minimum total distance. Refines
// through the spectrum at the midpoint when the step is too coarse or the
// assignment is ambiguous.
MatchResult match_step(const DissipativeSystem& system, double beta_a, const ComplexVector& a,
                       double beta_b, const ComplexVector& b, int depth) {
    const int n = static_cast<int>(a.size());
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cost(i, j) = std::abs(a(i) - b(j));
        }
    }
    std::vector<int> perm = min_cost_assignment(cost);

    double movement = 0.0;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        movement = std::max(movement, cost(i, perm[static_cast<size_t>(i)]));
        total += cost(i, perm[static_cast<size_t>(i)]);
    }
    double diameter = std::max(spectral_diameter(a), 1e-12);

    // A 2-swap against an optimal assignment never lowers the cost; a near-zero
    // swap margin between genuinely distinct targets means the continuation is
    // ambiguous at this resolution.
    bool ambiguous = false;
    for (int i = 0; i < n && !ambiguous; ++i) {
        for (int k = i + 1; k < n && !ambiguous; ++k) {
            int pi = perm[static_cast<size_t>(i)];
            int pk = perm[static_cast<size_t>(k)];
            if (std::abs(b(pi) - b(pk)) <= 1e-12) continue;
            double delta = cost(i, pk) + cost(k, pi) - cost(i, pi) - cost(k, pk);
            if (delta < 1e-12 * (1.0 + total)) ambiguous = true;
        }
    }

    bool too_coarse = movement > 0.1 * diameter;
    if ((too_coarse || ambiguous) && depth < 20 && beta_b - beta_a > 1e-14 * (1.0 + beta_b)) {
        double beta_m = 0.5 * (beta_a + beta_b);
        ComplexVector mid = sorted_eigenvalues(system, beta_m);
        MatchResult first = match_step(system, beta_a, a, beta_m, mid, depth + 1);
        MatchResult second = match_step(system, beta_m, mid, beta_b, b, depth + 1);
        MatchResult out;
        out.perm.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            out.perm[static_cast<size_t>(i)] =
                second.perm[static_cast<size_t>(first.perm[static_cast<size_t>(i)])];
        }
        out.ambiguous = first.ambiguous || second.ambiguous;
        return out;
    }

    return {perm, ambiguous};
}

} // namespace

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<size_t>(n) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            int i0 = p[static_cast<size_t>(j0)];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        if (p[static_cast<size_t>(j)]) row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
    }
    return row_to_col;
}

std::vector<SpectralBranch> sweep(const DissipativeSystem& system,
                                  const std::vector<double>& beta_grid) {
    if (beta_grid.size() < 2) {
        throw PreconditionViolated("sweep: grid must have at least 2 points");
    }
    for (size_t i = 0; i < beta_grid.size(); ++i) {
        if (beta_grid[i] < 0.0 || (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))) {
            throw PreconditionViolated("sweep: grid must be increasing and nonnegative");
        }
    }

    const int n = static_cast<int>(system.n);
    std::vector<SpectralBranch> branches(static_cast<size_t>(n));

    ComplexVector current = sorted_eigenvalues(system, beta_grid[0]);
    for (int i = 0; i < n; ++i) {
        branches[static_cast<size_t>(i)].branch_id = i + 1;
        branches[static_cast<size_t>(i)].samples.emplace_back(beta_grid[0], current(i));
    }

    // slot[i] = index into `current` currently followed by branch i.
    std::vector<int> slot(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) slot[static_cast<size_t>(i)] = i;

    for (size_t k = 1; k < beta_grid.size(); ++k) {
        ComplexVector next = sorted_eigenvalues(system, beta_grid[k]);
        MatchResult m = match_step(system, beta_grid[k - 1], current, beta_grid[k], next, 0);
        for (int i = 0; i < n; ++i) {
            int& s = slot[static_cast<size_t>(i)];
            s = m.perm[static_cast<size_t>(s)];
            branches[static_cast<size_t>(i)].samples.emplace_back(beta_grid[k], next(s));
            if (m.ambiguous) branches[static_cast<size_t>(i)].matching_ambiguous = true;
        }
        current = std::move(next);
    }
    return branches;
}

void classify(std::vector<SpectralBranch>& branches,
              const std::vector<HighLossMode>& high_modes,
              const std::vector<LowLossMode>& low_modes) {
    const int n = static_cast<int>(branches.size());
    if (n != static_cast<int>(high_modes.size() + low_modes.size())) {
        throw PreconditionViolated("classify: branch and mode counts disagree");
    }
    double beta_max = branches.front().samples.back().first;
    for (const auto& b : branches) beta_max = std::max(beta_max, b.samples.back().first);

    double min_ring = kInf;
    for (const auto& m : high_modes) min_ring = std::min(min_ring, m.zeta_ring);
    double max_rho = 0.0;
    for (const auto& m : high_modes) max_rho = std::max(max_rho, std::abs(m.rho));
    for (const auto& m : low_modes) max_rho = std::max(max_rho, std::abs(m.rho));
    if (beta_max < 10.0 * std::max(1.0, max_rho / min_ring)) {
        throw PreconditionViolated("classify: sweep does not reach the asymptotic regime");
    }

    std::vector<Complex> targets;
    targets.reserve(static_cast<size_t>(n));
    for (const auto& m : high_modes) targets.push_back(eval_eigenvalue_asymptote(m, beta_max));
    for (const auto& m : low_modes) targets.push_back(eval_eigenvalue_asymptote(m, beta_max));

    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
        Complex z = branches[static_cast<size_t>(i)].samples.back().second;
        for (int j = 0; j < n; ++j) {
            cost(i, j) = std::abs(z - targets[static_cast<size_t>(j)]);
        }
    }
    std::vector<int> perm = min_cost_assignment(cost);

    const int nb = static_cast<int>(high_modes.size());
    for (int i = 0; i < n; ++i) {
        Complex z = branches[static_cast<size_t>(i)].samples.back().second;
        double residual = cost(i, perm[static_cast<size_t>(i)]);
        if (residual > 0.5 * std::abs(z) + 1.0) {
            throw ClassificationFailed(
                "classify: residual against nearest asymptote too large; extend the sweep");
        }
        int j = perm[static_cast<size_t>(i)];
        auto& branch = branches[static_cast<size_t>(i)];
        if (j < nb) {
            branch.klass = BranchClass::HighLoss;
            branch.matched_mode = j;
        } else {
            branch.klass = BranchClass::LowLoss;
            branch.matched_mode = j - nb;
        }
    }
}

void detect_overdamping(std::vector<SpectralBranch>& branches, double tol_re) {
    for (auto& branch : branches) {
        branch.overdamped_from.reset();
        for (auto it = branch.samples.rbegin(); it != branch.samples.rend(); ++it) {
            const Complex z = it->second;
            if (std::abs(z.real()) <= tol_re * std::max(1.0, std::abs(z.imag()))) {
                branch.overdamped_from = it->first;
            } else {
                break;
            }
        }
    }
}

CriticalPoint locate_critical_point(const DissipativeSystem& system, double beta_lo,
                                    double beta_hi) {
    if (!(beta_lo >= 0.0) || !(beta_hi > beta_lo)) {
        throw PreconditionViolated("locate_critical_point: invalid bracket");
    }
    constexpr double tol_re = 1e-9;
    auto off_axis_count = [&](double beta) {
        ComplexVector vals = sorted_eigenvalues(system, beta);
        int count = 0;
        for (Eigen::Index i = 0; i < vals.size(); ++i) {
            if (std::abs(vals(i).real()) > tol_re * std::max(1.0, std::abs(vals(i).imag()))) {
                ++count;
            }
        }
        return count;
    };

    int c_lo = off_axis_count(beta_lo);
    int c_hi = off_axis_count(beta_hi);
    if (c_lo <= c_hi) {
        throw NoMergeInBracket(
            "locate_critical_point: no branch pair leaves the off-axis region inside the bracket");
    }

    double lo = beta_lo, hi = beta_hi;
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (off_axis_count(mid) > c_hi) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    CriticalPoint cp;
    cp.beta0 = 0.5 * (lo + hi);
    ComplexVector vals = sorted_eigenvalues(system, cp.beta0);
    double best = kInf;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        for (Eigen::Index j = i + 1; j < vals.size(); ++j) {
            double gap = std::abs(vals(i) - vals(j));
            if (gap < best) {
                best = gap;
                cp.merging_branches = {static_cast<int>(i), static_cast<int>(j)};
                cp.zeta0 = 0.5 * (vals(i) + vals(j));
            }
        }
    }
    cp.refinement_residual = best;
    if (std::abs(cp.zeta0.real()) > 1e-8 * std::max(std::abs(cp.zeta0), 1e-300)) {
        throw NoMergeInBracket("locate_critical_point: merged eigenvalue is not purely imaginary");
    }
    return cp;
}

double check_spectral_symmetry(const DissipativeSystem& system,
                               const std::vector<double>& beta_samples) {
    double worst = 0.0;
    for (double beta : beta_samples) {
        ComplexVector vals = sorted_eigenvalues(system, beta);
        const Eigen::Index n = vals.size();
        double directed = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex mirror = -std::conj(vals(i));
            double nearest = kInf;
            for (Eigen::Index j = 0; j < n; ++j) {
                nearest = std::min(nearest, std::abs(vals(j) - mirror));
            }
            directed = std::max(directed, nearest);
        }
        worst = std::max(worst, directed);
    }
    return worst;
}

} // namespace lossdyn
