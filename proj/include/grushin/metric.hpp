#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grushin/geometry.hpp"
#include "grushin/profile.hpp"

namespace grushin {

/// Which term of max{ |du|, min{ M, |dv| / max{r'(u), r'(u')} } } realizes
/// the quasidistance.
enum class QuasidistanceBranch {
    horizontal_dominates,
    ratio_dominates,
    M_dominates,
    both_on_axis,
};

std::string to_string(QuasidistanceBranch b);

struct QuasidistanceResult {
    double value = 0.0;
    /// Root of M r'(M) = |dv|; present whenever |dv| > 0.
    std::optional<double> M;
    QuasidistanceBranch branch = QuasidistanceBranch::horizontal_dominates;
};

/// Unique nonnegative root of M r'(M) = dv (dv >= 0).  Bisection on a
/// doubling bracket; the residual satisfies |M r'(M) - dv| <= 1e-10 (1 + dv).
double solve_M(const Profile& p, double dv);

/// Symmetric quasidistance d_r(w, w2).  When both points sit on the
/// singular line the v-ratio is 0/0 and the value is M by convention.
QuasidistanceResult quasidistance(const Profile& p, GrushinPoint w, GrushinPoint w2);

/// Piecewise-linear horizontal path through the listed nodes.  length_r
/// caches the path functional at construction time and is recomputable
/// via path_length.
struct HorizontalPath {
    std::vector<GrushinPoint> nodes;
    double length_r = 0.0;
};

/// Length functional: per segment, the integral of
/// sqrt(du^2 + dv^2 / r'(u)^2) by 8-point Gauss-Legendre quadrature.
/// Purely horizontal segments cost |du| exactly and vertical segments at
/// u != 0 cost |dv|/r'(u) exactly.  Segments crossing u = 0 are split at
/// the crossing with the node perturbed to |u| = 1e-12.  An exactly
/// vertical segment on the singular line has no horizontal realization:
/// the result is +infinity.
double path_length(const Profile& p, const HorizontalPath& path);

/// Build a path over `nodes` with length_r filled in.
HorizontalPath make_path(const Profile& p, std::vector<GrushinPoint> nodes);

/// Best L-shaped upper bound for the CC distance: minimizes
/// |u - t| + |dv| / r'(t) + |t - u2| over the pivot t, searched per sign
/// region (the pivot cannot sit on the singular line when dv != 0).
/// Returns the value and the realizing 4-node path.
std::pair<double, HorizontalPath> cc_upper_lshape(const Profile& p, GrushinPoint w,
                                                  GrushinPoint w2);

/// Upper estimate of the CC distance: the L-shape path is resampled to
/// n_nodes and improved by n_iters sweeps of per-node coordinate descent
/// (golden-section line searches alternating u and v moves).  The value
/// never exceeds the L-shape bound and is the exact length of the
/// returned path.
std::pair<double, HorizontalPath> cc_estimate(const Profile& p, GrushinPoint w,
                                              GrushinPoint w2, int n_nodes = 11,
                                              int n_iters = 3);

struct ComparabilityReport {
    bool passed = false;
    double quasidistance = 0.0;
    double cc_estimate = 0.0;
    double cc_lshape = 0.0;
    double ratio_cc_over_d = 0.0;   ///< must be <= 5 (1 + tol)
    double ratio_d_over_cc = 0.0;   ///< must be <= 2 m_hat (1 + tol)
    double upper_factor = 5.0;
    double lower_factor = 0.0;      ///< 2 m_hat
    double tol = 1e-6;
};

/// Check the two-sided comparability between the CC estimate and the
/// quasidistance.  Requires p.m_hat (runs estimate_doubling's default
/// sweep if unset is not an option: throws std::invalid_argument).
ComparabilityReport comparability_check(const Profile& p, GrushinPoint w, GrushinPoint w2);

/// Deterministic greedy covering count of an axis-aligned square by
/// quasidistance balls of radius eps: column pitch eps in u; per column at
/// abscissa t, vertical pitch eps * max{r'(t), r'(eps)} (the vertical
/// reach of an eps-ball through the M-channel is eps * r'(eps)).
/// Refuses with RefusalError when the projected count exceeds 1e8.
long long covering_number(const Profile& p, Square sq, double eps);

} // namespace grushin
