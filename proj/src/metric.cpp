#include "grushin/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grushin/errors.hpp"
#include "grushin/numerics.hpp"

namespace grushin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(QuasidistanceBranch b) {
    switch (b) {
        case QuasidistanceBranch::horizontal_dominates: return "horizontal_dominates";
        case QuasidistanceBranch::ratio_dominates: return "ratio_dominates";
        case QuasidistanceBranch::M_dominates: return "M_dominates";
        case QuasidistanceBranch::both_on_axis: return "both_on_axis";
    }
    return "horizontal_dominates";
}

double solve_M(const Profile& p, double dv) {
    if (!(dv >= 0.0) || !std::isfinite(dv))
        throw std::invalid_argument("solve_M: dv must be finite and >= 0");
    if (dv == 0.0) return 0.0;

    // F(t) = t r'(t) - dv is increasing from -dv; double the bracket end
    // until it turns nonnegative, then bisect.
    auto F = [&](double t) { return t * p.r_prime(t) - dv; };
    double hi = 1.0;
    int grow = 0;
    while (F(hi) < 0.0) {
        hi *= 2.0;
        if (++grow > 1100) throw DivergenceError("solve_M: bracket growth failed");
    }
    double lo = 0.0;
    const double tol = 1e-10 * (1.0 + dv);
    double mid = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f = F(mid);
        if (std::abs(f) <= 0.25 * tol) return mid;
        (f < 0.0 ? lo : hi) = mid;
    }
    // Machine-width bracket: pick the end with the smaller residual.
    const double rl = std::abs(F(lo)), rh = std::abs(F(hi));
    const double best = (rl <= rh) ? lo : hi;
    if (std::min(rl, rh) > tol)
        throw DivergenceError("solve_M: residual tolerance not met");
    return best;
}

QuasidistanceResult quasidistance(const Profile& p, GrushinPoint w, GrushinPoint w2) {
    QuasidistanceResult res;
    const double du = std::abs(w.u - w2.u);
    const double dv = std::abs(w.v - w2.v);
    if (dv == 0.0) {
        res.value = du;
        res.branch = QuasidistanceBranch::horizontal_dominates;
        return res;
    }
    const double M = solve_M(p, dv);
    res.M = M;
    const double rpmax = std::max(p.r_prime(w.u), p.r_prime(w2.u));
    if (rpmax == 0.0) {
        // Both points on the singular line: the v-ratio is 0/0 and the
        // value is M by convention (du = 0 here).
        res.value = std::max(du, M);
        res.branch = QuasidistanceBranch::both_on_axis;
        return res;
    }
    const double ratio = dv / rpmax;
    const double inner = std::min(M, ratio);
    res.value = std::max(du, inner);
    if (du >= inner)
        res.branch = QuasidistanceBranch::horizontal_dominates;
    else
        res.branch = (M <= ratio) ? QuasidistanceBranch::M_dominates
                                  : QuasidistanceBranch::ratio_dominates;
    return res;
}

namespace {

/// Length of one straight segment under the path functional.
double segment_length(const Profile& p, GrushinPoint a, GrushinPoint b) {
    const double du = b.u - a.u;
    const double dv = b.v - a.v;
    if (dv == 0.0) return std::abs(du);
    if (du == 0.0) {
        const double rp = p.r_prime(a.u);
        if (!(rp > 0.0)) return kInf;  // vertical on the singular line
        return std::abs(dv) / rp;
    }
    if ((a.u > 0.0 && b.u < 0.0) || (a.u < 0.0 && b.u > 0.0)) {
        // Split at the axis crossing; nudge the crossing node off the line.
        const double t = a.u / (a.u - b.u);
        const double vc = a.v + t * dv;
        const GrushinPoint c1{std::copysign(1e-12, a.u), vc};
        const GrushinPoint c2{std::copysign(1e-12, b.u), vc};
        return segment_length(p, a, c1) + segment_length(p, c2, b);
    }
    auto f = [&](double t) {
        const double u = a.u + t * du;
        const double s = dv / p.r_prime(u);
        return std::sqrt(du * du + s * s);
    };
    return num::gauss8(f, 0.0, 1.0);
}

} // namespace

double path_length(const Profile& p, const HorizontalPath& path) {
    if (path.nodes.size() < 2)
        throw std::invalid_argument("path_length: need at least 2 nodes");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        acc += segment_length(p, path.nodes[i], path.nodes[i + 1]);
        if (!std::isfinite(acc)) return kInf;
    }
    return acc;
}

HorizontalPath make_path(const Profile& p, std::vector<GrushinPoint> nodes) {
    HorizontalPath path;
    path.nodes = std::move(nodes);
    path.length_r = path_length(p, path);
    return path;
}

std::pair<double, HorizontalPath> cc_upper_lshape(const Profile& p, GrushinPoint w,
                                                  GrushinPoint w2) {
    const double du = std::abs(w.u - w2.u);
    const double dv = std::abs(w.v - w2.v);
    if (dv == 0.0) {
        auto path = make_path(p, {w, {w2.u, w.v}, {w2.u, w.v}, w2});
        return {path.length_r, path};
    }

    // Pivot cost: out to t, vertical ride at t, back in to u2.
    auto J = [&](double t) {
        const double rp = p.r_prime(t);
        if (!(rp > 0.0)) return kInf;
        return std::abs(w.u - t) + std::abs(t - w2.u) + dv / rp;
    };

    const double M = solve_M(p, dv);
    const double B = 2.0 * (std::max(std::abs(w.u), std::abs(w2.u)) + M + du) + 1.0;
    num::MinResult best{0.0, kInf};
    for (double side : {1.0, -1.0}) {
        auto cands = num::logspace(B * 1e-9, B, 41);
        for (auto& c : cands) c *= side;
        // The endpoints' abscissae and the M-pivot realize the proof's
        // case bounds (<= 2 d_r off the M-branch, <= 5 d_r on it); keeping
        // them in the candidate set makes those bounds hold by construction.
        for (double extra : {w.u, w2.u, side * M})
            if (extra * side > 0.0 && std::abs(extra) <= B) cands.push_back(extra);
        auto r = num::scan_golden_min(J, cands, 80);
        if (r.fx < best.fx) best = r;
    }

    const double t = best.x;
    auto path = make_path(p, {w, {t, w.v}, {t, w2.v}, w2});
    return {path.length_r, path};
}

namespace {

/// Spread the L-shape's three legs over n_nodes without moving the
/// corners: extra nodes are apportioned to legs by cost share (largest
/// remainder), then equally spaced inside each leg.
std::vector<GrushinPoint> resample_lshape(const Profile& p,
                                          const std::vector<GrushinPoint>& corners,
                                          int n_nodes) {
    double cost[3];
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        cost[i] = segment_length(p, corners[i], corners[i + 1]);
        if (std::isfinite(cost[i])) total += cost[i];
    }
    int extra = n_nodes - 4;
    int give[3] = {0, 0, 0};
    if (extra > 0) {
        if (total > 0.0) {
            double frac[3];
            int used = 0;
            for (int i = 0; i < 3; ++i) {
                const double share = std::isfinite(cost[i]) ? cost[i] / total : 0.0;
                const double quota = extra * share;
                give[i] = static_cast<int>(std::floor(quota));
                frac[i] = quota - give[i];
                used += give[i];
            }
            for (int left = extra - used; left > 0; --left) {
                int pick = 0;
                for (int i = 1; i < 3; ++i)
                    if (frac[i] > frac[pick]) pick = i;
                ++give[pick];
                frac[pick] = -1.0;
            }
        } else {
            give[0] = extra;
        }
    }
    std::vector<GrushinPoint> nodes;
    nodes.reserve(static_cast<std::size_t>(n_nodes));
    for (int leg = 0; leg < 3; ++leg) {
        const GrushinPoint a = corners[leg], b = corners[leg + 1];
        nodes.push_back(a);
        for (int k = 1; k <= give[leg]; ++k) {
            const double t = static_cast<double>(k) / (give[leg] + 1);
            nodes.push_back({a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)});
        }
    }
    nodes.push_back(corners[3]);
    return nodes;
}

} // namespace

std::pair<double, HorizontalPath> cc_estimate(const Profile& p, GrushinPoint w,
                                              GrushinPoint w2, int n_nodes, int n_iters) {
    if (n_nodes < 4) throw std::invalid_argument("cc_estimate: need n_nodes >= 4");
    if (n_iters < 0) throw std::invalid_argument("cc_estimate: need n_iters >= 0");
    if (w == w2) {
        auto path = make_path(p, {w, w2});
        return {0.0, path};
    }

    auto [lvalue, lpath] = cc_upper_lshape(p, w, w2);
    std::vector<GrushinPoint> nodes = resample_lshape(p, lpath.nodes, n_nodes);
    const std::size_t n = nodes.size();

    auto local = [&](std::size_t i) {
        return segment_length(p, nodes[i - 1], nodes[i]) +
               segment_length(p, nodes[i], nodes[i + 1]);
    };

    const double scale = std::isfinite(lvalue)
                             ? lvalue
                             : std::max({std::abs(w.u - w2.u), std::abs(w.v - w2.v), 1.0});
    for (int sweep = 0; sweep < n_iters; ++sweep) {
        const double shrink = std::pow(0.6, sweep);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            // u line search
            {
                const double su =
                    std::max(std::abs(nodes[i + 1].u - nodes[i - 1].u),
                             scale / static_cast<double>(n - 1)) *
                    shrink;
                const double u0 = nodes[i].u;
                auto f = [&](double c) {
                    GrushinPoint save = nodes[i];
                    nodes[i].u = c;
                    const double val = local(i);
                    nodes[i] = save;
                    return val;
                };
                const double cur = f(u0);
                std::vector<double> cands;
                for (int k = -4; k <= 4; ++k) cands.push_back(u0 + su * k / 4.0);
                auto best = num::scan_golden_min(f, cands, 48);
                if (best.fx < cur) nodes[i].u = best.x;
            }
            // v line search; the natural v-scale at abscissa u is r'(u)
            // per unit of length.
            {
                const double rp = p.r_prime(nodes[i].u);
                const double sv =
                    std::max({std::abs(nodes[i + 1].v - nodes[i - 1].v),
                              rp * scale / static_cast<double>(n - 1), 1e-30}) *
                    shrink;
                const double v0 = nodes[i].v;
                auto f = [&](double c) {
                    GrushinPoint save = nodes[i];
                    nodes[i].v = c;
                    const double val = local(i);
                    nodes[i] = save;
                    return val;
                };
                const double cur = f(v0);
                std::vector<double> cands;
                for (int k = -4; k <= 4; ++k) cands.push_back(v0 + sv * k / 4.0);
                auto best = num::scan_golden_min(f, cands, 48);
                if (best.fx < cur) nodes[i].v = best.x;
            }
        }
    }

    auto path = make_path(p, std::move(nodes));
    return {path.length_r, path};
}

ComparabilityReport comparability_check(const Profile& p, GrushinPoint w, GrushinPoint w2) {
    if (!p.m_hat)
        throw std::invalid_argument(
            "comparability_check: profile needs m_hat (run estimate_doubling first)");
    ComparabilityReport rep;
    rep.quasidistance = quasidistance(p, w, w2).value;
    auto [cc, path] = cc_estimate(p, w, w2);
    rep.cc_estimate = cc;
    rep.cc_lshape = cc_upper_lshape(p, w, w2).first;
    rep.lower_factor = 2.0 * *p.m_hat;
    rep.ratio_cc_over_d = rep.quasidistance > 0.0 ? cc / rep.quasidistance : 0.0;
    rep.ratio_d_over_cc = cc > 0.0 ? rep.quasidistance / cc : 0.0;
    const double grace = 1.0 + rep.tol;
    rep.passed = cc <= 5.0 * rep.quasidistance * grace &&
                 rep.quasidistance <= rep.lower_factor * cc * grace;
    return rep;
}

long long covering_number(const Profile& p, Square sq, double eps) {
    if (!(eps > 0.0) || !(sq.side > 0.0))
        throw std::invalid_argument("covering_number: need eps > 0 and side > 0");
    if (eps > sq.side)
        throw std::invalid_argument("covering_number: eps must not exceed the side");

    // ceil with a one-part-in-1e12 relative guard so representable exact
    // divisions (1/0.1 -> 10.000000000000002) do not pick up a ghost row.
    auto count_ceil = [](double x) {
        return static_cast<long long>(std::ceil(x * (1.0 - 1e-12)));
    };

    const double floor_rp = p.r_prime(eps);
    const long long cols = std::max(count_ceil(sq.side / eps), 1LL);
    long long total = 0;
    for (long long j = 0; j < cols; ++j) {
        const double t = sq.corner.u + (static_cast<double>(j) + 0.5) * eps;
        const double pitch = eps * std::max(p.r_prime(t), floor_rp);
        if (!(pitch > 0.0)) throw DivergenceError("covering_number: degenerate pitch");
        total += std::max(count_ceil(sq.side / pitch), 1LL);
        if (total > 100000000LL)
            throw RefusalError("covering_number: more than 1e8 centers requested");
    }
    return total;
}

} // namespace grushin
