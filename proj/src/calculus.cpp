#include "grushin/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grushin/errors.hpp"
#include "grushin/numerics.hpp"
#include "grushin/symmetry.hpp"

namespace grushin {

namespace {
using cplx = std::complex<double>;
constexpr double kNuFloor = 1e-8;
} // namespace

double Matrix2::frobenius() const {
    return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
}

Matrix2 operator-(const Matrix2& lhs, const Matrix2& rhs) {
    return {lhs.a11 - rhs.a11, lhs.a12 - rhs.a12, lhs.a21 - rhs.a21, lhs.a22 - rhs.a22};
}

GrushinMap conjugated_map(const Profile& p, PlaneMap f) {
    GrushinMap m;
    m.kind = GrushinMap::Kind::conjugated_plane_map;
    m.name = f.name;
    m.profile = p;
    auto fn = f.f;
    m.g1 = [p, fn](double u, double v) {
        return p.r_inverse(fn(cplx{p.r(u), v}).real());
    };
    m.g2 = [p, fn](double u, double v) { return fn(cplx{p.r(u), v}).imag(); };
    m.plane_map = std::move(f);
    return m;
}

GrushinMap evaluator_map(const Profile& p, std::string name,
                         std::function<double(double, double)> g1,
                         std::function<double(double, double)> g2) {
    if (!g1 || !g2)
        throw std::invalid_argument("evaluator_map: both evaluators are required");
    GrushinMap m;
    m.kind = GrushinMap::Kind::coordinate_evaluators;
    m.name = std::move(name);
    m.profile = p;
    m.g1 = std::move(g1);
    m.g2 = std::move(g2);
    return m;
}

DerivativeSample frame_derivative(const GrushinMap& m, GrushinPoint at, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("frame_derivative: need finite h > 0");
    if (!(std::abs(at.u) > h))
        throw DomainError("frame_derivative: stencil touches the singular line");

    const Profile& p = m.profile;
    const double hv = h * p.r_prime(at.u);

    const double e1 = m.g1(at.u + h, at.v), e2 = m.g2(at.u + h, at.v);
    const double w1 = m.g1(at.u - h, at.v), w2 = m.g2(at.u - h, at.v);
    const double n1 = m.g1(at.u, at.v + hv), n2 = m.g2(at.u, at.v + hv);
    const double s1 = m.g1(at.u, at.v - hv), s2 = m.g2(at.u, at.v - hv);

    DerivativeSample ds;
    ds.at = at;
    ds.fd_step = h;
    const double inv = 1.0 / (2.0 * h);
    ds.Ug1 = (e1 - w1) * inv;
    ds.Ug2 = (e2 - w2) * inv;
    ds.Vg1 = (n1 - s1) * inv;
    ds.Vg2 = (n2 - s2) * inv;

    // W and Wbar act on the image coordinates (r o g1, g2).
    const double Ut = (p.r(e1) - p.r(w1)) * inv;
    const double Vt = (p.r(n1) - p.r(s1)) * inv;
    ds.W_tilde = 0.5 * cplx{Ut + ds.Vg2, ds.Ug2 - Vt};
    ds.Wbar_tilde = 0.5 * cplx{Ut - ds.Vg2, ds.Ug2 + Vt};
    if (std::abs(ds.W_tilde) > kNuFloor) ds.nu = ds.Wbar_tilde / ds.W_tilde;

    ds.r_prime_g1 = p.r_prime(m.g1(at.u, at.v));
    if (ds.r_prime_g1 > 0.0 && std::isfinite(ds.r_prime_g1)) {
        ds.Drg = {ds.Ug1, ds.Vg1, ds.Ug2 / ds.r_prime_g1, ds.Vg2 / ds.r_prime_g1};
        ds.drg_defined =
            std::isfinite(ds.Drg.a11) && std::isfinite(ds.Drg.a12) &&
            std::isfinite(ds.Drg.a21) && std::isfinite(ds.Drg.a22);
    }
    return ds;
}

std::optional<std::complex<double>> grushin_beltrami_nu(const GrushinMap& m,
                                                        GrushinPoint at, double h) {
    return frame_derivative(m, at, h).nu;
}

std::optional<std::complex<double>> classical_beltrami_mu(const PlaneMap& f,
                                                          PlanePoint z, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("classical_beltrami_mu: need finite h > 0");
    const cplx z0{z.x, z.y};
    const cplx fx = (f.f(z0 + h) - f.f(z0 - h)) / (2.0 * h);
    const cplx fy = (f.f(z0 + cplx{0.0, h}) - f.f(z0 - cplx{0.0, h})) / (2.0 * h);
    const cplx fz = 0.5 * (fx - cplx{0.0, 1.0} * fy);
    const cplx fzb = 0.5 * (fx + cplx{0.0, 1.0} * fy);
    if (std::abs(fz) <= kNuFloor) return std::nullopt;
    return fzb / fz;
}

ConsistencyReport conjugation_consistency(const GrushinMap& m, Region grid, double h,
                                          double tube_margin) {
    if (m.kind != GrushinMap::Kind::conjugated_plane_map || !m.plane_map)
        throw std::invalid_argument(
            "conjugation_consistency: needs a conjugated plane map");
    if (!(tube_margin > h))
        throw std::invalid_argument("conjugation_consistency: margin must exceed h");
    if (grid.nu < 2 || grid.nv < 2)
        throw std::invalid_argument("conjugation_consistency: need a 2x2 grid or finer");

    ConsistencyReport rep;
    rep.fd_step = h;
    rep.tube_margin = tube_margin;
    for (double u : num::linspace(grid.u_lo, grid.u_hi, grid.nu)) {
        for (double v : num::linspace(grid.v_lo, grid.v_hi, grid.nv)) {
            if (std::abs(u) < tube_margin || std::abs(m.g1(u, v)) < tube_margin) {
                ++rep.n_skipped;
                continue;
            }
            const auto nu = frame_derivative(m, {u, v}, h).nu;
            const auto mu =
                classical_beltrami_mu(*m.plane_map, phi(m.profile, {u, v}), h);
            if (!nu || !mu) {
                ++rep.n_skipped;
                continue;
            }
            ++rep.n_evaluated;
            const double dev = std::abs(*nu - *mu);
            if (dev > rep.max_deviation) {
                rep.max_deviation = dev;
                rep.worst = {u, v};
            }
        }
    }
    return rep;
}

namespace {

struct ProbeVerdict {
    bool ok = true;
    std::string reason;
};

/// Limit analysis of Drg along 8 directions into a suspected singular
/// point: each direction samples at margin * 2^{-j}, j = 0..3, demands
/// geometric convergence to a common nonzero limit.
ProbeVerdict probe_singular_point(const GrushinMap& m, GrushinPoint at, double h,
                                  double margin) {
    static const double dirs[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                      {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    std::vector<Matrix2> limits;
    int attempted = 0;
    for (const auto& d : dirs) {
        Matrix2 samples[4];
        bool usable = true;
        for (int j = 0; j < 4 && usable; ++j) {
            const double t = margin * std::ldexp(1.0, -j);
            const GrushinPoint q{at.u + t * d[0], at.v + t * d[1]};
            if (!(std::abs(q.u) > 2.0 * h)) {
                usable = false;
                break;
            }
            const auto ds = frame_derivative(m, q, h);
            if (!ds.drg_defined) {
                return {false, "frame derivative undefined approaching the "
                               "singular set"};
            }
            samples[j] = ds.Drg;
        }
        if (!usable) continue;
        ++attempted;
        const double d0 = (samples[1] - samples[0]).frobenius();
        const double d1 = (samples[2] - samples[1]).frobenius();
        const double d2 = (samples[3] - samples[2]).frobenius();
        if (!(d1 <= 0.7 * d0 + 1e-9) || !(d2 <= 0.7 * d1 + 1e-9))
            return {false, "frame derivative fails to converge approaching the "
                           "singular set"};
        if (!(samples[3].frobenius() > 1e-6))
            return {false, "frame derivative limit vanishes at the singular set"};
        limits.push_back(samples[3]);
    }
    if (attempted < 3 || limits.size() < 3)
        return {false, "insufficient probe data near the singular set"};
    double max_norm = 0.0;
    for (const auto& L : limits) max_norm = std::max(max_norm, L.frobenius());
    for (std::size_t i = 0; i < limits.size(); ++i)
        for (std::size_t j = i + 1; j < limits.size(); ++j)
            if ((limits[i] - limits[j]).frobenius() > 0.1 * (1.0 + max_norm))
                return {false, "directional limits disagree at the singular set"};
    return {true, ""};
}

std::string point_str(GrushinPoint w) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", w.u, w.v);
    return buf;
}

} // namespace

ConformalityCertificate conformality_test(const GrushinMap& m, Region region, double h,
                                          double tol, double tube_margin) {
    if (!(h > 0.0) || !(tol > 0.0))
        throw std::invalid_argument("conformality_test: need h > 0 and tol > 0");
    if (!(tube_margin > h))
        throw std::invalid_argument("conformality_test: margin must exceed h");
    if (region.nu < 2 || region.nv < 2)
        throw std::invalid_argument("conformality_test: need a 2x2 grid or finer");

    ConformalityCertificate cert;
    cert.fd_step = h;
    cert.tube_margin = tube_margin;
    cert.tol = tol;
    cert.min_det = std::numeric_limits<double>::infinity();
    cert.passed = true;

    const auto us = num::linspace(region.u_lo, region.u_hi, region.nu);
    const auto vs = num::linspace(region.v_lo, region.v_hi, region.nv);
    const long long max_probes = 16;

    auto run_probe = [&](GrushinPoint at) {
        if (cert.n_probes >= max_probes) return;
        ++cert.n_probes;
        const auto verdict = probe_singular_point(m, at, h, tube_margin);
        if (!verdict.ok) {
            cert.passed = false;
            cert.failures.push_back(verdict.reason + " near " + point_str(at));
        }
    };

    // g1 values on the full grid drive both the tube test and crossing
    // detection; NaN marks the u-tube where g1 is not consulted.
    std::vector<double> g1_grid(us.size() * vs.size(),
                                std::numeric_limits<double>::quiet_NaN());
    auto g1_at = [&](std::size_t i, std::size_t j) -> double& {
        return g1_grid[i * vs.size() + j];
    };

    double worst_measure = -1.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t j = 0; j < vs.size(); ++j) {
            const double u = us[i], v = vs[j];
            if (std::abs(u) < tube_margin) {
                ++cert.n_skipped;
                continue;
            }
            const double g1v = m.g1(u, v);
            g1_at(i, j) = g1v;
            if (std::abs(g1v) < tube_margin) {
                // The point maps into the singular tube: conformality there
                // is a limit statement, so probe instead of differencing.
                run_probe({u, v});
                continue;
            }
            const auto ds = frame_derivative(m, {u, v}, h);
            if (!ds.drg_defined) {
                cert.passed = false;
                cert.failures.push_back("frame derivative undefined at " +
                                        point_str({u, v}));
                continue;
            }
            ++cert.n_grid;
            const double diag = std::abs(ds.Drg.a11 - ds.Drg.a22);
            const double off = std::abs(ds.Drg.a12 + ds.Drg.a21);
            const double det = ds.Drg.det();
            cert.max_diag_dev = std::max(cert.max_diag_dev, diag);
            cert.max_offdiag_dev = std::max(cert.max_offdiag_dev, off);
            cert.min_det = std::min(cert.min_det, det);
            if (ds.nu) cert.max_abs_nu = std::max(cert.max_abs_nu, std::abs(*ds.nu));
            const double measure = std::max({diag, off, tol - det});
            if (measure > worst_measure) {
                worst_measure = measure;
                cert.worst = {u, v};
            }
            if (diag > tol || off > tol || !(det > tol)) {
                cert.passed = false;
                if (cert.failures.size() < 8)
                    cert.failures.push_back("matrix check failed at " +
                                            point_str({u, v}));
            }
        }
    }

    // Sign changes of g1 between evaluated neighbors locate crossings of
    // the pre-image of the singular line; bisect and probe them.
    auto crossing = [&](GrushinPoint a, double fa, GrushinPoint b) {
        for (int it = 0; it < 60; ++it) {
            const GrushinPoint mid{0.5 * (a.u + b.u), 0.5 * (a.v + b.v)};
            const double fm = m.g1(mid.u, mid.v);
            if ((fa < 0.0) == (fm < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        return a;
    };
    for (std::size_t i = 0; i < us.size() && cert.n_probes < max_probes; ++i) {
        for (std::size_t j = 0; j < vs.size(); ++j) {
            const double fa = g1_at(i, j);
            if (std::isnan(fa)) continue;
            const GrushinPoint a{us[i], vs[j]};
            if (i + 1 < us.size()) {
                const double fb = g1_at(i + 1, j);
                if (!std::isnan(fb) && (fa < 0.0) != (fb < 0.0) &&
                    std::min(std::abs(fa), std::abs(fb)) >= tube_margin)
                    run_probe(crossing(a, fa, {us[i + 1], vs[j]}));
            }
            if (j + 1 < vs.size()) {
                const double fb = g1_at(i, j + 1);
                if (!std::isnan(fb) && (fa < 0.0) != (fb < 0.0) &&
                    std::min(std::abs(fa), std::abs(fb)) >= tube_margin)
                    run_probe(crossing(a, fa, {us[i], vs[j + 1]}));
            }
        }
    }

    // A region straddling the singular line additionally requires the line
    // to map into itself (checked at sampled axis points).
    if (region.u_lo <= 0.0 && region.u_hi >= 0.0) {
        for (double v : vs) {
            const double image = m.profile.r(m.g1(0.0, v));
            if (!(std::abs(image) <= 1e-9 * (1.0 + std::abs(v)))) {
                cert.passed = false;
                cert.failures.push_back(
                    "singular line does not map into itself at " +
                    point_str({0.0, v}));
                break;
            }
        }
    }

    if (cert.n_grid == 0 && cert.n_probes == 0) {
        cert.passed = false;
        cert.failures.push_back("no evaluable grid points in the region");
    }
    if (!std::isfinite(cert.min_det)) cert.min_det = 0.0;
    return cert;
}

} // namespace grushin
