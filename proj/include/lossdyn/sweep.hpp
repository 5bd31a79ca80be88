#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lossdyn/high_loss.hpp"
#include "lossdyn/system.hpp"

namespace lossdyn {

enum class BranchClass { Unresolved, HighLoss, LowLoss };

/// One eigenvalue branch zeta(beta) tracked by continuity over the grid.
struct SpectralBranch {
    int branch_id = 0;  // 1-based, by (Re, Im) order of the first grid point
    BranchClass klass = BranchClass::Unresolved;
    std::vector<std::pair<double, Complex>> samples;
    int matched_mode = -1;  // index into the high- or low-loss mode list
    std::optional<double> overdamped_from;
    bool matching_ambiguous = false;  // continuity matching stayed ambiguous
};

/// Loss value where two branches merge into a purely imaginary degenerate
/// eigenvalue (the boundary of the overdamping regime).
struct CriticalPoint {
    double beta0 = 0.0;
    Complex zeta0{};
    std::pair<int, int> merging_branches{-1, -1};  // indices in the (Re, Im)-sorted
                                                   // spectrum at beta0
    double refinement_residual = 0.0;
};

/// Tracks the n eigenvalue branches of omega - i*beta*b over the grid.
/// Matching between consecutive grid points is a minimum-total-distance
/// assignment; midpoints are inserted internally (up to depth 20) where the
/// eigenvalues move more than 10% of the local spectral diameter or the
/// assignment is ambiguous. Samples are reported at the grid points only.
std::vector<SpectralBranch> sweep(const DissipativeSystem& system,
                                  const std::vector<double>& beta_grid);

/// Labels each branch high- or low-loss by matching its value at the largest
/// sampled beta against the asymptotes, as a bijection between branches and
/// modes. Requires the sweep to extend far enough that the asymptotes
/// dominate (largest beta at least 10 * max(1, max|rho| / min zeta_ring)).
void classify(std::vector<SpectralBranch>& branches,
              const std::vector<HighLossMode>& high_modes,
              const std::vector<LowLossMode>& low_modes);

/// For each branch, records the smallest sampled beta after which the branch
/// stays on the imaginary axis (|Re zeta| <= tol_re * max(1, |Im zeta|)).
void detect_overdamping(std::vector<SpectralBranch>& branches, double tol_re = 1e-9);

/// Bisects inside (beta_lo, beta_hi), which must contain exactly one merge of
/// two branches onto the imaginary axis, until the bracket width is <= 1e-10.
CriticalPoint locate_critical_point(const DissipativeSystem& system, double beta_lo,
                                    double beta_hi);

/// Maximum over the samples of the Hausdorff distance between the spectrum
/// of omega - i*beta*b and its mirror image {-conj(zeta)}.
double check_spectral_symmetry(const DissipativeSystem& system,
                               const std::vector<double>& beta_samples);

/// Minimum-total-distance assignment between two equally sized eigenvalue
/// sets; returns the column matched to each row. Exposed for the oracle-style
/// tests that re-match tracked branches against reference spectra.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

} // namespace lossdyn
