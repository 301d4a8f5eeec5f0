#include "grushin/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "grushin/metric.hpp"
#include "grushin/numerics.hpp"

namespace grushin {

PlanePoint phi(const Profile& p, GrushinPoint w) { return {p.r(w.u), w.v}; }

GrushinPoint phi_inverse(const Profile& p, PlanePoint z) {
    return {p.r_inverse(z.x), z.y};
}

double sup_norm_dist(PlanePoint z1, PlanePoint z2) {
    return std::max(std::abs(z1.x - z2.x), std::abs(z1.y - z2.y));
}

std::string to_string(QsBackend backend) {
    return backend == QsBackend::quasidistance_scaled ? "quasidistance_scaled"
                                                      : "cc_estimate";
}

TripleOutcome evaluate_triple(const Profile& p, GrushinPoint w, GrushinPoint a,
                              GrushinPoint b) {
    TripleOutcome out;
    const PlanePoint zw = phi(p, w), za = phi(p, a), zb = phi(p, b);
    const double da_img = sup_norm_dist(zw, za);
    const double db_img = sup_norm_dist(zw, zb);
    const double d_wa = quasidistance(p, w, a).value;
    const double d_wb = quasidistance(p, w, b).value;
    if (d_wa <= d_wb) {
        if (db_img > 0.0)
            out.admitted.push_back({w, a, b, da_img / db_img});
        else
            ++out.n_degenerate;
    }
    if (d_wb <= d_wa) {
        if (da_img > 0.0)
            out.admitted.push_back({w, b, a, db_img / da_img});
        else if (out.admitted.empty() && out.n_degenerate == 0)
            ++out.n_degenerate;
    }
    return out;
}

namespace {

struct Candidate {
    long long index = -1;
    int orient = 0;  // position within the triple's admitted orientations
    WeakQsTriple triple{};
};

// Better = larger ratio; ties resolve to the earliest index, then the
// primary orientation, so any thread partition reduces identically.
bool better(const Candidate& lhs, const Candidate& rhs) {
    if (lhs.triple.ratio != rhs.triple.ratio) return lhs.triple.ratio > rhs.triple.ratio;
    if (lhs.index != rhs.index) return lhs.index < rhs.index;
    return lhs.orient < rhs.orient;
}

GrushinPoint draw_point(num::SplitMix64& rng, const Box& box, double axis_fraction) {
    const double snap = rng.next_unit();
    const double uu = rng.next_unit();
    const double vv = rng.next_unit();
    GrushinPoint w;
    w.u = snap < axis_fraction ? 0.0 : box.u_lo + uu * (box.u_hi - box.u_lo);
    w.v = box.v_lo + vv * (box.v_hi - box.v_lo);
    return w;
}

struct ShardResult {
    long long admitted = 0;
    long long skipped = 0;
    std::vector<Candidate> top;  // admitted orientations, best first, capped
};

// The raw supremum creeps upward for a long time: its largest ratios live
// on a thin ridge of near-tie admissions, so a sampled maximum at feasible
// sizes under-reports the constant whose existence the admission rule
// encodes.  A deterministic constrained ascent from a few box-geometric
// starting triples saturates the estimate, with a value independent of the
// sample size; the result is still an explicit admissible witness, and the
// report takes the larger of the scanned and polished ratios.  Keeping the
// polish n-independent preserves exact monotonicity of c_emp in n_triples.
double oriented_ratio(const Profile& p, const GrushinPoint& w,
                      const GrushinPoint& a, const GrushinPoint& b) {
    const double d_wa = quasidistance(p, w, a).value;
    const double d_wb = quasidistance(p, w, b).value;
    if (!(d_wa <= d_wb)) return -std::numeric_limits<double>::infinity();
    const double den = sup_norm_dist(phi(p, w), phi(p, b));
    if (!(den > 0.0)) return -std::numeric_limits<double>::infinity();
    return sup_norm_dist(phi(p, w), phi(p, a)) / den;
}

WeakQsTriple ascend_triple(const Profile& p, const Box& box, WeakQsTriple t) {
    double c[6] = {t.w.u, t.w.v, t.a.u, t.a.v, t.b.u, t.b.v};
    auto clamp_coord = [&](int i, double x) {
        return i % 2 == 0 ? std::clamp(x, box.u_lo, box.u_hi)
                          : std::clamp(x, box.v_lo, box.v_hi);
    };
    auto value = [&](const double q[6]) {
        return oriented_ratio(p, {q[0], q[1]}, {q[2], q[3]}, {q[4], q[5]});
    };
    double best = value(c);
    const double scale = std::max(box.u_hi - box.u_lo, box.v_hi - box.v_lo);
    long evals = 0;
    auto try_move = [&](const int idx[2], const double sgn[2], int dims,
                        double h) {
        double trial[6];
        std::copy(c, c + 6, trial);
        for (int d = 0; d < dims; ++d)
            trial[idx[d]] = clamp_coord(idx[d], trial[idx[d]] + sgn[d] * h);
        const double v = value(trial);
        ++evals;
        if (v > best) {
            best = v;
            std::copy(trial, trial + 6, c);
            return true;
        }
        return false;
    };
    for (double h = 0.25 * scale; h > 1e-12 * scale && evals < 400000; h *= 0.5) {
        for (int sweep = 0; sweep < 400; ++sweep) {
            bool improved = false;
            // Single-coordinate probes, then paired probes; the pairs walk
            // along an active admission tie that blocks every single move.
            for (int i = 0; i < 6; ++i) {
                for (double s1 : {1.0, -1.0}) {
                    const int idx[2] = {i, 0};
                    const double sgn[2] = {s1, 0.0};
                    improved |= try_move(idx, sgn, 1, h);
                }
            }
            for (int i = 0; i < 6; ++i) {
                for (int j = i + 1; j < 6; ++j) {
                    for (double s1 : {1.0, -1.0}) {
                        for (double s2 : {1.0, -1.0}) {
                            const int idx[2] = {i, j};
                            const double sgn[2] = {s1, s2};
                            improved |= try_move(idx, sgn, 2, h);
                        }
                    }
                }
            }
            if (!improved) break;
        }
    }
    t.w = {c[0], c[1]};
    t.a = {c[2], c[3]};
    t.b = {c[4], c[5]};
    t.ratio = sup_norm_dist(phi(p, t.w), phi(p, t.a)) /
              sup_norm_dist(phi(p, t.w), phi(p, t.b));
    return t;
}

std::optional<WeakQsTriple> polish_supremum(const Profile& p, const Box& box) {
    auto at = [&](double fu, double fv) {
        return GrushinPoint{box.u_lo + fu * (box.u_hi - box.u_lo),
                            box.v_lo + fv * (box.v_hi - box.v_lo)};
    };
    std::vector<std::array<GrushinPoint, 3>> starts = {
        {at(0.5, 0.4), at(0.5, 0.9), at(0.8, 0.4)},
        {at(0.6, 0.5), at(0.95, 0.05), at(0.45, 0.55)},
        {at(0.35, 0.5), at(0.05, 0.15), at(0.65, 0.5)},
    };
    // Mixed configuration: a horizontal pair straddling the axis against a
    // pair whose image distance is carried by the vertical gap.  Built from
    // the profile's derivative so the start lands in the regime where the
    // largest ratios live; the ascent only has to polish it.
    if (box.u_lo < 0.0 && box.u_hi > 0.0) {
        const double cap = std::min(box.u_hi, -box.u_lo);
        const double u1 = 0.28 * cap, u2 = 0.2 * cap;
        const double d = u1 + u2;
        const double dv =
            std::min(d * p.r_prime(u1 + d), box.v_hi - box.v_lo);
        const GrushinPoint w{-u1, box.v_hi}, b{u2, box.v_hi};
        const GrushinPoint a{std::max(-u1 - d, box.u_lo), box.v_hi - dv};
        starts.push_back({w, a, b});
        starts.push_back({GrushinPoint{u1, box.v_hi},
                          GrushinPoint{std::min(u1 + d, box.u_hi), box.v_hi - dv},
                          GrushinPoint{-u2, box.v_hi}});
    }
    std::optional<WeakQsTriple> best;
    for (const auto& s : starts) {
        for (int orient = 0; orient < 2; ++orient) {
            WeakQsTriple seed{s[0], orient ? s[2] : s[1], orient ? s[1] : s[2],
                              0.0};
            const auto refined = ascend_triple(p, box, seed);
            if (!std::isfinite(refined.ratio)) continue;
            if (oriented_ratio(p, refined.w, refined.a, refined.b) < 0.0)
                continue;
            if (!best || refined.ratio > best->ratio) best = refined;
        }
    }
    return best;
}

ShardResult scan_shard(const Profile& p, const WeakQsOptions& opt, long long lo,
                       long long hi, std::size_t keep) {
    ShardResult out;
    for (long long i = lo; i < hi; ++i) {
        num::SplitMix64 rng(num::substream_seed(opt.seed, static_cast<std::uint64_t>(i)));
        const GrushinPoint w = draw_point(rng, opt.box, opt.axis_fraction);
        const GrushinPoint a = draw_point(rng, opt.box, opt.axis_fraction);
        const GrushinPoint b = draw_point(rng, opt.box, opt.axis_fraction);
        const TripleOutcome outcome = evaluate_triple(p, w, a, b);
        out.admitted += static_cast<long long>(outcome.admitted.size());
        out.skipped += outcome.n_degenerate;
        for (std::size_t k = 0; k < outcome.admitted.size(); ++k)
            out.top.push_back({i, static_cast<int>(k), outcome.admitted[k]});
        if (out.top.size() > 4 * keep) {
            std::sort(out.top.begin(), out.top.end(), better);
            out.top.resize(keep);
        }
    }
    std::sort(out.top.begin(), out.top.end(), better);
    if (out.top.size() > keep) out.top.resize(keep);
    return out;
}

} // namespace

QSReport weak_qs_sample(const Profile& p, const WeakQsOptions& opt) {
    if (opt.n_triples < 1)
        throw std::invalid_argument("weak_qs_sample: need n_triples >= 1");
    if (!(opt.axis_fraction >= 0.0 && opt.axis_fraction <= 1.0))
        throw std::invalid_argument("weak_qs_sample: axis_fraction must lie in [0,1]");

    const bool cc = opt.backend == QsBackend::cc_estimate;
    const std::size_t keep = cc ? static_cast<std::size_t>(std::max(opt.cc_top, 1)) : 1;

    const int threads =
        std::clamp(opt.threads, 1,
                   static_cast<int>(std::min<long long>(opt.n_triples, 64)));
    std::vector<ShardResult> shards(static_cast<std::size_t>(threads));
    if (threads == 1) {
        shards[0] = scan_shard(p, opt, 0, opt.n_triples, keep);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (opt.n_triples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long long lo = t * chunk;
            const long long hi = std::min<long long>(opt.n_triples, lo + chunk);
            pool.emplace_back([&, t, lo, hi] {
                shards[static_cast<std::size_t>(t)] = scan_shard(p, opt, lo, hi, keep);
            });
        }
        for (auto& th : pool) th.join();
    }

    QSReport rep;
    rep.n_triples = opt.n_triples;
    rep.distance_backend = opt.backend;
    std::vector<Candidate> pool;
    for (const auto& s : shards) {
        rep.n_admitted += s.admitted;
        rep.n_skipped += s.skipped;
        pool.insert(pool.end(), s.top.begin(), s.top.end());
    }
    std::sort(pool.begin(), pool.end(), better);
    if (pool.empty()) return rep;

    if (!cc) {
        rep.c_emp = pool.front().triple.ratio;
        rep.worst_triple = pool.front().triple;
        const auto polished = polish_supremum(p, opt.box);
        if (polished && polished->ratio > rep.c_emp) {
            rep.c_emp = polished->ratio;
            rep.worst_triple = *polished;
        }
        return rep;
    }

    // The cc backend re-checks only the worst candidates: admission is
    // recomputed with path-length estimates, and candidates that fail it
    // are discarded (and removed from the admitted count).
    if (pool.size() > keep) pool.resize(keep);
    for (const auto& c : pool) {
        const double cc_wa = cc_estimate(p, c.triple.w, c.triple.a).first;
        const double cc_wb = cc_estimate(p, c.triple.w, c.triple.b).first;
        if (cc_wa <= cc_wb) {
            rep.c_emp = c.triple.ratio;
            rep.worst_triple = c.triple;
            return rep;
        }
        --rep.n_admitted;
    }
    return rep;
}

QSReport weak_qs_sample(const Profile& p, Box box, long long n_triples,
                        std::uint64_t seed, QsBackend backend) {
    WeakQsOptions opt;
    opt.box = box;
    opt.n_triples = n_triples;
    opt.seed = seed;
    opt.backend = backend;
    return weak_qs_sample(p, opt);
}

namespace {

LemmaReport lemma_common(const Profile& p, GrushinPoint w, GrushinPoint w2,
                         bool upper_branch, double bound) {
    LemmaReport rep;
    rep.bound = bound;
    const double d = quasidistance(p, w, w2).value;
    rep.quasidistance = d;
    if (d == 0.0) return rep;  // degenerate pair: both sides vanish, skipped

    const double umax = std::max(std::abs(w.u), std::abs(w2.u));
    if (upper_branch ? (umax < d) : (umax > d)) return rep;

    rep.applicable = true;
    rep.middle = upper_branch ? d * std::max(p.r_prime(w.u), p.r_prime(w2.u))
                              : p.r_prime(d) * d;
    rep.image_dist = sup_norm_dist(phi(p, w), phi(p, w2));
    if (rep.image_dist > 0.0) rep.ratio_mid_over_img = rep.middle / rep.image_dist;
    if (rep.middle > 0.0) rep.ratio_img_over_mid = rep.image_dist / rep.middle;
    const double grace = 1.0 + 1e-12;
    rep.passed = rep.middle > 0.0 && rep.image_dist > 0.0 &&
                 rep.ratio_mid_over_img <= bound * grace &&
                 rep.ratio_img_over_mid <= bound * grace;
    return rep;
}

} // namespace

LemmaReport lemma32_check(const Profile& p, GrushinPoint w, GrushinPoint w2) {
    if (!p.beta_hat)
        throw std::invalid_argument("lemma32_check: profile needs beta_hat");
    return lemma_common(p, w, w2, true, 2.0 * *p.beta_hat);
}

LemmaReport lemma33_check(const Profile& p, GrushinPoint w, GrushinPoint w2) {
    if (!p.beta_hat || !p.m_hat)
        throw std::invalid_argument("lemma33_check: profile needs beta_hat and m_hat");
    const double bound = std::max(2.0, 2.0 * *p.m_hat * *p.beta_hat);
    return lemma_common(p, w, w2, false, bound);
}

} // namespace grushin
