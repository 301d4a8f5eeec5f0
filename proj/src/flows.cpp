#include "grushin/flows.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "grushin/errors.hpp"
#include "grushin/numerics.hpp"
#include "grushin/plane_maps.hpp"

namespace grushin {

namespace {

using cplx = std::complex<double>;

void validate(const FlowSpec& spec) {
    if (spec.k < 1 || spec.k > 40)
        throw std::invalid_argument("flow: k must lie in [1, 40]");
    if (!(spec.s >= 0.0) || !std::isfinite(spec.s))
        throw std::invalid_argument("flow: s must be finite and >= 0");
}

} // namespace

long long FlowSpec::alpha() const {
    if (k < 3) throw std::invalid_argument("FlowSpec::alpha: defined for k >= 3");
    return 1LL << (k - 2);
}

FlowField xi_eta(const FlowSpec& spec) {
    validate(spec);
    const int k = spec.k;
    const Profile p = spec.profile;

    FlowField field;
    if (k == 1) {
        field.xi = [](double, double) { return 0.0; };
        field.eta = [](double, double) { return 1.0; };
        field.b = [](double, double) { return cplx{0.0, 1.0}; };
        return field;
    }

    // xi_2 = r/r' extended by its limit 0 across the axis
    // (|r/r'| <= |u| from the growth inequality).
    auto xi2 = [p](double u) {
        const double rp = p.r_prime(u);
        if (rp == 0.0) return 0.0;
        return p.r(u) / rp;
    };
    auto pair_eval = [k, p, xi2](double u, double v) {
        double xi = xi2(u), eta = v;
        const double rp = p.r_prime(u);
        for (int level = 3; level <= k; ++level) {
            const double sx = rp * xi;
            const double nxi = 2.0 * xi * eta;
            eta = eta * eta - sx * sx;
            xi = nxi;
        }
        return std::pair<double, double>{xi, eta};
    };
    field.xi = [pair_eval](double u, double v) { return pair_eval(u, v).first; };
    field.eta = [pair_eval](double u, double v) { return pair_eval(u, v).second; };
    field.b = [pair_eval, p](double u, double v) {
        const auto [xi, eta] = pair_eval(u, v);
        return cplx{p.r_prime(u) * xi, eta};
    };
    return field;
}

std::pair<double, double> flow_rhs(const FlowSpec& spec, GrushinPoint w) {
    const auto field = xi_eta(spec);
    return {field.xi(w.u, w.v), field.eta(w.u, w.v)};
}

double branch_safe_radius(const FlowSpec& spec) {
    validate(spec);
    if (spec.k < 3)
        throw std::invalid_argument("branch_safe_radius: defined for k >= 3");
    if (spec.s == 0.0) return std::numeric_limits<double>::infinity();
    const double am1 = static_cast<double>(spec.alpha() - 1);
    return std::pow(1.0 / (am1 * spec.s), 1.0 / am1);
}

bool branch_domain_contains(const FlowSpec& spec, GrushinPoint w) {
    validate(spec);
    if (spec.k < 3 || spec.s == 0.0) return true;
    const cplx z{spec.profile.r(w.u), w.v};
    const auto parts = payne_plane_parts(spec.k, spec.s, z);
    if (parts.tiny_denominator) return false;
    if (spec.k == 3) return true;
    // Principal-branch safety: the base must stay off the closed negative
    // real axis, with a small angular guard band.
    const double gap = 3.14159265358979323846 - std::abs(std::arg(parts.w_c));
    return gap > 5e-7 && std::abs(parts.w_c) > 0.0;
}

GrushinPoint closed_form_flow(const FlowSpec& spec, GrushinPoint w) {
    validate(spec);
    if (spec.s == 0.0) return w;
    const Profile& p = spec.profile;
    switch (spec.k) {
        case 1: return {w.u, w.v + spec.s};
        case 2: return {p.r_inverse(p.r(w.u) * std::exp(spec.s)), w.v * std::exp(spec.s)};
        default: break;
    }
    if (!branch_domain_contains(spec, w))
        throw DomainError("closed_form_flow: point outside the branch-safe domain");
    const cplx z{p.r(w.u), w.v};
    const auto parts = payne_plane_parts(spec.k, spec.s, z);
    if (parts.tiny_denominator)
        throw DivergenceError("closed_form_flow: denominator below 1e-12, map blows up");
    return {p.r_inverse(parts.value.real()), parts.value.imag()};
}

GrushinPoint integrate_flow(const FlowSpec& spec, GrushinPoint w, int n_steps) {
    validate(spec);
    if (n_steps < 1) throw std::invalid_argument("integrate_flow: need n_steps >= 1");
    if (spec.s == 0.0) return w;

    const auto field = xi_eta(spec);
    const double h = spec.s / n_steps;
    double u = w.u, v = w.v;
    for (int step = 0; step < n_steps; ++step) {
        const FlowSpec remaining{spec.k, spec.s - step * h, spec.profile};
        if (!branch_domain_contains(remaining, {u, v}))
            throw DivergenceError(
                "integrate_flow: trajectory leaves the branch-safe domain at step " +
                std::to_string(step));
        if (!(std::abs(u) <= 1e12 && std::abs(v) <= 1e12))
            throw DivergenceError("integrate_flow: state magnitude exceeds 1e12 at step " +
                                  std::to_string(step));
        const double k1u = field.xi(u, v), k1v = field.eta(u, v);
        const double k2u = field.xi(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        const double k2v = field.eta(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        const double k3u = field.xi(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        const double k3v = field.eta(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        const double k4u = field.xi(u + h * k3u, v + h * k3v);
        const double k4v = field.eta(u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return {u, v};
}

GrushinMap flow_map(const FlowSpec& spec) {
    validate(spec);
    char label[64];
    std::snprintf(label, sizeof(label), "payne_flow:%d,%g", spec.k, spec.s);
    return evaluator_map(
        spec.profile, label,
        [spec](double u, double v) { return closed_form_flow(spec, {u, v}).u; },
        [spec](double u, double v) { return closed_form_flow(spec, {u, v}).v; });
}

ConformalityCertificate flow_conformality_check(const FlowSpec& spec, Region region,
                                                double h) {
    validate(spec);
    for (double u : num::linspace(region.u_lo, region.u_hi, region.nu))
        for (double v : num::linspace(region.v_lo, region.v_hi, region.nv))
            if (!branch_domain_contains(spec, {u, v}))
                throw DomainError(
                    "flow_conformality_check: region leaves the branch-safe domain");
    return conformality_test(flow_map(spec), region, h);
}

} // namespace grushin
