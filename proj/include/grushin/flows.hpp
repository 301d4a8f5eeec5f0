#pragma once

#include <complex>
#include <functional>
#include <utility>

#include "grushin/calculus.hpp"
#include "grushin/geometry.hpp"
#include "grushin/profile.hpp"

namespace grushin {

/// One member of the flow family: field index k >= 1 and time s >= 0.
struct FlowSpec {
    int k = 1;
    double s = 0.0;
    Profile profile;

    /// alpha = 2^{k-2}, the closed-form exponent; defined for k >= 3.
    long long alpha() const;
};

struct FlowField {
    std::function<double(double, double)> xi;
    std::function<double(double, double)> eta;
    std::function<std::complex<double>(double, double)> b;  // r'(u) xi + i eta
};

/// Field evaluators from the recursion (xi_1, eta_1) = (0, 1),
/// (xi_2, eta_2) = (r/r', v) with the limit value 0 at u = 0, and
/// (xi_k, eta_k) = (2 xi eta, eta^2 - (r' xi)^2).
FlowField xi_eta(const FlowSpec& spec);

/// Right-hand side (xi_k, eta_k) at w.
std::pair<double, double> flow_rhs(const FlowSpec& spec, GrushinPoint w);

/// Time-s map of the flow: k = 1 translates v, k = 2 scales through r,
/// k >= 3 conjugates the plane map z / ((1-alpha)(-iz)^{alpha-1} s + 1)^{1/(alpha-1)}.
/// s = 0 is the identity bit-for-bit.
GrushinPoint closed_form_flow(const FlowSpec& spec, GrushinPoint w);

/// Fixed-step classical Runge-Kutta; checks the remaining-time branch
/// domain and a 1e12 magnitude guard before every step.
GrushinPoint integrate_flow(const FlowSpec& spec, GrushinPoint w, int n_steps);

/// Principal-branch safety of the closed form at w. Always true for
/// k < 3 and s = 0. For k = 3 the single bad point is z = i/s; for k >= 4
/// the denominator base must avoid the closed negative real axis, with a
/// guard band 5e-7 radians on each side.
bool branch_domain_contains(const FlowSpec& spec, GrushinPoint w);

/// |z| below this radius is branch-safe for k >= 3:
/// (1 / ((alpha-1) s))^{1/(alpha-1)}; +infinity when s = 0.
double branch_safe_radius(const FlowSpec& spec);

/// Conformality certificate for the time-s map on a region; the region
/// grid must be branch-safe, otherwise the precondition is rejected.
ConformalityCertificate flow_conformality_check(const FlowSpec& spec, Region region,
                                                double h);

/// The time-s map as a GrushinMap for the calculus module.
GrushinMap flow_map(const FlowSpec& spec);

} // namespace grushin
