#pragma once

// Critical points of the momentum map and their Williamson classification.
//
// Non-degeneracy is tested through the eigenvalue pattern of the linearized
// flow A(c) = Pi * (c1 Hess J + c2 Hess H) at the critical point, for several
// generic combinations c drawn from a fixed seeded sequence. The eigenvalues
// of such a linearization come in symplectic patterns: pairs {+-i a} (elliptic
// block), {+-a} (hyperbolic block) or quadruples {+-a +- i b} (focus-focus
// block); an unstable or incomplete pattern marks the point degenerate.

#include <complex>
#include <vector>

#include "semitoric/systems.hpp"

namespace semitoric {

struct SingularityReport {
    PhasePoint point;                       // embedded chart
    int rank = 0;
    int k_e = 0, k_h = 0, k_f = 0;
    std::vector<std::complex<double>> frequencies; // linearization eigenvalues
    bool degenerate = false;
};

// Numerical rank of the n x 2n Jacobian of F at p, from singular values with
// threshold 1e-8 * sigma_max (sigma_max floored at 1e-12).
int jacobian_rank(const System& sys, const PhasePoint& p);

struct CriticalPointSearch {
    std::vector<PhasePoint> points; // embedded, deduplicated, sorted
    int failed_seeds = 0;           // non-converged seeds (reported, not fatal)
};

// Isolated critical points of the requested rank inside the documented
// search window (System::search_boxes). For rank-1 families the result is a
// sampled curve along a grid of J-levels.
CriticalPointSearch find_critical_points(const System& sys, int rank_target,
                                         int seeds_per_box = 512);

// Eigenvalues of the linearized flow of c1*f_1 + ... at a critical point,
// computed in the preferred chart. Exposed for the invariance tests.
std::vector<std::complex<double>> linearization_eigenvalues(const System& sys,
                                                            const PhasePoint& p,
                                                            const Eigen::VectorXd& c);

// Classify a critical point; sets `degenerate` instead of guessing when the
// eigenvalue pattern is unstable across the generic draws.
SingularityReport classify_singularity_report(const System& sys, const PhasePoint& p,
                                              std::uint64_t seed = 0);

// Same, but throws DegeneratePoint when the flag is set.
SingularityReport classify_singularity(const System& sys, const PhasePoint& p,
                                       std::uint64_t seed = 0);

// Full census: rank-0 points classified, plus a classified sample of the
// rank-1 locus for 2-DOF systems.
struct SingularityCensus {
    std::vector<SingularityReport> rank0;
    std::vector<SingularityReport> rank1_samples;
    int failed_seeds = 0;
};
SingularityCensus singularity_census(const System& sys, std::uint64_t seed = 0,
                                     int rank1_samples = 24);

} // namespace semitoric
