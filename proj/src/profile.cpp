#include "grushin/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "grushin/errors.hpp"
#include "grushin/numerics.hpp"

namespace grushin {

std::string to_string(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::classical: return "classical";
        case ProfileFamily::power: return "power";
        case ProfileFamily::log_power: return "log_power";
        case ProfileFamily::custom: return "custom";
    }
    return "custom";
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::string num_tag(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

/// Monotone bisection inverse of an odd increasing r.  Bracket [0, b] grows
/// geometrically from b = 1 until it contains the target; then plain
/// bisection, 200 iterations max with early exit at machine-width brackets.
std::function<double(double)> bisection_inverse(std::function<double(double)> r) {
    return [r = std::move(r)](double x) -> double {
        if (x == 0.0) return 0.0;
        const double ax = std::abs(x);
        const double sg = sign(x);
        double hi = 1.0;
        int grow = 0;
        while (sg * r(sg * hi) < ax) {
            hi *= 2.0;
            if (++grow > 1100) throw DivergenceError("r_inverse: bracket growth failed");
        }
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (sg * r(sg * mid) < ax)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-16 * (1.0 + hi)) break;
        }
        return sg * 0.5 * (lo + hi);
    };
}

} // namespace

Profile make_profile(ProfileFamily family, const std::map<std::string, double>& params) {
    Profile p;
    p.family = family;
    p.params = params;
    switch (family) {
        case ProfileFamily::classical: {
            p.name = "classical";
            p.params.clear();
            p.r = [](double u) { return 0.5 * u * std::abs(u); };
            p.r_prime = [](double u) { return std::abs(u); };
            p.r_inverse = [](double x) { return sign(x) * std::sqrt(2.0 * std::abs(x)); };
            break;
        }
        case ProfileFamily::power: {
            auto it = params.find("alpha");
            if (it == params.end() || !(it->second > 0.0) || !std::isfinite(it->second))
                throw std::invalid_argument("power profile needs params[\"alpha\"] > 0");
            const double a = it->second;
            p.name = "power:" + num_tag(a);
            p.params = {{"alpha", a}};
            p.r = [a](double u) { return u * std::pow(std::abs(u), a) / (a + 1.0); };
            p.r_prime = [a](double u) { return std::pow(std::abs(u), a); };
            p.r_inverse = [a](double x) {
                return sign(x) * std::pow((a + 1.0) * std::abs(x), 1.0 / (a + 1.0));
            };
            break;
        }
        case ProfileFamily::log_power: {
            auto it = params.find("p");
            if (it == params.end() || !(it->second > 1.0) || !std::isfinite(it->second))
                throw std::invalid_argument("log_power profile needs params[\"p\"] > 1");
            const double q = it->second;
            p.name = "log_power:" + num_tag(q);
            p.params = {{"p", q}};
            p.r = [q](double u) {
                const double au = std::abs(u);
                return sign(u) * std::pow(au, q) * std::log1p(au);
            };
            p.r_prime = [q](double u) {
                const double au = std::abs(u);
                if (au == 0.0) return 0.0;
                return q * std::pow(au, q - 1.0) * std::log1p(au) +
                       std::pow(au, q) / (au + 1.0);
            };
            p.r_inverse = bisection_inverse(p.r);
            break;
        }
        case ProfileFamily::custom:
            throw std::invalid_argument("custom profiles are built via make_custom_profile");
    }
    return p;
}

Profile make_custom_profile(std::string name, std::function<double(double)> r,
                            std::function<double(double)> r_prime,
                            std::function<double(double)> r_inverse) {
    if (!r || !r_prime) throw std::invalid_argument("custom profile needs r and r_prime");
    Profile p;
    p.name = std::move(name);
    p.family = ProfileFamily::custom;
    p.r = std::move(r);
    p.r_prime = std::move(r_prime);
    p.r_inverse = r_inverse ? std::move(r_inverse) : bisection_inverse(p.r);
    return p;
}

Profile parse_profile(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto num = [&](const char* key) -> double {
        try {
            std::size_t used = 0;
            double v = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("profile '" + head + "' needs a numeric " +
                                        std::string(key) + ", got '" + arg + "'");
        }
    };
    if (head == "classical") {
        if (!arg.empty()) throw std::invalid_argument("classical profile takes no parameter");
        return make_profile(ProfileFamily::classical);
    }
    if (head == "power") return make_profile(ProfileFamily::power, {{"alpha", num("alpha")}});
    if (head == "log" || head == "log_power")
        return make_profile(ProfileFamily::log_power, {{"p", num("p")}});
    throw std::invalid_argument("unknown profile '" + text +
                                "' (expected classical, power:A, or log:P)");
}

namespace {

struct SupTrack {
    double value = -std::numeric_limits<double>::infinity();
    double at = 0.0;
    std::size_t index = 0;

    void offer(double v, double u, std::size_t i) {
        if (v > value) {
            value = v;
            at = u;
            index = i;
        }
    }
};

/// Divergence heuristic on a log-spaced sample of q(u): split into log
/// bins; flag when the global sup sits in a boundary bin whose sup still
/// exceeds its neighbor by a relative margin.  A sequence converging to a
/// finite limit has bin-sup ratios -> 1 and is not flagged.
bool boundary_divergence(const std::vector<double>& q, std::size_t argmax) {
    const std::size_t n = q.size();
    if (n < 24) return false;
    constexpr std::size_t kBins = 12;
    constexpr double kGrowth = 1.0 + 1e-3;
    double bin_sup[kBins];
    for (auto& b : bin_sup) b = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t b = std::min(kBins - 1, i * kBins / n);
        bin_sup[b] = std::max(bin_sup[b], q[i]);
    }
    const std::size_t argmax_bin = std::min(kBins - 1, argmax * kBins / n);
    if (argmax_bin == kBins - 1 && bin_sup[kBins - 1] > bin_sup[kBins - 2] * kGrowth)
        return true;
    if (argmax_bin == 0 && bin_sup[0] > bin_sup[1] * kGrowth) return true;
    return false;
}

} // namespace

CertEstimate estimate_beta(Profile& p, Interval u_range, int n_samples) {
    if (!(u_range.lo > 0.0) || !(u_range.hi > u_range.lo))
        throw std::invalid_argument("estimate_beta: need 0 < lo < hi");
    const auto grid = num::logspace(u_range.lo, u_range.hi, n_samples);
    std::vector<double> q;
    q.reserve(grid.size());
    SupTrack sup;
    bool overflowed = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = grid[i];
        const double ru = p.r(u);
        const double val = (ru != 0.0) ? u * p.r_prime(u) / ru
                                       : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(val)) overflowed = true;
        const double ok = std::isfinite(val) ? val : -std::numeric_limits<double>::infinity();
        q.push_back(ok);
        sup.offer(ok, u, i);
    }
    CertEstimate est;
    est.value = sup.value;
    est.at_u = sup.at;
    est.diverging = overflowed || boundary_divergence(q, sup.index);
    p.beta_hat = est.value;
    return est;
}

CertEstimate estimate_doubling(Profile& p, Interval u_range, int n_samples) {
    if (!(u_range.lo > 0.0) || !(u_range.hi > u_range.lo))
        throw std::invalid_argument("estimate_doubling: need 0 < lo < hi in [0, inf)");
    const auto grid = num::logspace(u_range.lo, u_range.hi, n_samples);
    std::vector<double> q;
    q.reserve(grid.size());
    SupTrack sup;
    bool overflowed = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = grid[i];
        const double denom = p.r_prime(u);
        const double val = (denom > 0.0) ? p.r_prime(2.0 * u) / denom
                                         : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(val)) overflowed = true;
        const double ok = std::isfinite(val) ? val : -std::numeric_limits<double>::infinity();
        q.push_back(ok);
        sup.offer(ok, u, i);
    }
    CertEstimate est;
    est.value = sup.value;
    est.at_u = sup.at;
    est.diverging = overflowed || boundary_divergence(q, sup.index);
    p.m_hat = est.value;
    return est;
}

namespace {

struct CheckBuilder {
    ProfileCheck check;
    bool first = true;

    explicit CheckBuilder(std::string name) { check.name = std::move(name); }

    /// Track the worst margin (most positive = closest to / deepest in violation).
    void offer(bool ok, double margin, double at) {
        if (!ok) check.passed = false;
        if (first || margin > check.worst_value) {
            check.worst_value = margin;
            check.worst_at = at;
            first = false;
        }
    }
};

} // namespace

ProfileReport validate_profile(Profile& p, Interval u_range, int n_samples) {
    ProfileReport rep;
    rep.profile_name = p.name;

    const auto beta = estimate_beta(p, u_range, n_samples);
    const auto doubling = estimate_doubling(p, u_range, n_samples);
    rep.beta_hat = beta.value;
    rep.m_hat = doubling.value;
    rep.beta_certified = beta.value * kCertSafetyFactor;
    rep.m_certified = doubling.value * kCertSafetyFactor;
    rep.beta_diverging = beta.diverging;
    rep.m_diverging = doubling.diverging;

    const auto grid = num::logspace(u_range.lo, u_range.hi, n_samples);

    CheckBuilder origin("r(0) = 0");
    {
        const double r0 = p.r(0.0);
        origin.offer(std::abs(r0) <= 1e-12, std::abs(r0), 0.0);
    }

    CheckBuilder odd("r odd");
    CheckBuilder even("r' even");
    CheckBuilder nonneg("r' >= 0");
    CheckBuilder signs("sign(r(u)) = sign(u)");
    CheckBuilder growth("r(u)/u <= r'(u) <= beta r(u)/u");
    CheckBuilder ratio_mono("r(u)/u nondecreasing");
    CheckBuilder mono("r strictly increasing");
    CheckBuilder roundtrip("r_inverse(r(u)) = u");

    const double beta_bound = beta.value;
    double prev_r = 0.0, prev_ratio = 0.0;
    bool have_prev = false;
    for (double u : grid) {
        const double ru = p.r(u), rmu = p.r(-u);
        const double rpu = p.r_prime(u), rpmu = p.r_prime(-u);

        odd.offer(std::abs(ru + rmu) <= 1e-9 * (1.0 + std::abs(ru)),
                  std::abs(ru + rmu), u);
        even.offer(std::abs(rpu - rpmu) <= 1e-12 * (1.0 + std::abs(rpu)),
                   std::abs(rpu - rpmu), u);
        nonneg.offer(rpu >= 0.0, -rpu, u);
        signs.offer(ru > 0.0 && rmu < 0.0, -ru, u);

        const double slope = ru / u;
        growth.offer(slope <= rpu * (1.0 + 1e-12) &&
                         rpu <= beta_bound * slope * (1.0 + 1e-12),
                     std::max(slope - rpu, rpu - beta_bound * slope), u);

        if (have_prev) {
            mono.offer(ru > prev_r, prev_r - ru, u);
            ratio_mono.offer(slope >= prev_ratio * (1.0 - 1e-12), prev_ratio - slope, u);
        }
        prev_r = ru;
        prev_ratio = slope;
        have_prev = true;

        for (double s : {u, -u}) {
            const double back = p.r_inverse(p.r(s));
            roundtrip.offer(std::abs(back - s) <= 1e-9 * (1.0 + std::abs(s)),
                            std::abs(back - s), s);
        }
    }

    CheckBuilder beta_finite("beta finite over range");
    beta_finite.offer(!beta.diverging && std::isfinite(beta.value),
                      beta.diverging ? beta.value : 0.0, beta.at_u);
    if (beta.diverging)
        beta_finite.check.note = "sampled sup still growing at the range boundary";

    CheckBuilder m_finite("doubling constant finite over range");
    m_finite.offer(!doubling.diverging && std::isfinite(doubling.value),
                   doubling.diverging ? doubling.value : 0.0, doubling.at_u);

    // Evidence for r' being a homeomorphism of [0, inf): warning level only.
    // Strict growth and r'(0) = 0 are sampled; surjectivity is assumed.
    ProfileCheck homeo;
    homeo.name = "r' homeomorphism of [0, inf)";
    homeo.warning = true;
    homeo.note = "surjectivity assumed, not certified from samples";
    {
        const double rp0 = p.r_prime(0.0);
        if (std::abs(rp0) > 1e-9) {
            homeo.passed = false;
            homeo.worst_value = std::abs(rp0);
            homeo.worst_at = 0.0;
        }
        double prev = rp0;
        double prev_u = 0.0;
        for (double u : grid) {
            const double rp = p.r_prime(u);
            if (rp <= prev) {
                homeo.passed = false;
                if (prev - rp >= homeo.worst_value) {
                    homeo.worst_value = prev - rp;
                    homeo.worst_at = u;
                }
            }
            prev = rp;
            prev_u = u;
        }
        (void)prev_u;
    }

    rep.checks = {origin.check, odd.check,       even.check,     nonneg.check,
                  signs.check,  growth.check,    ratio_mono.check, mono.check,
                  roundtrip.check, beta_finite.check, m_finite.check, homeo};

    rep.admissible = true;
    for (const auto& c : rep.checks) {
        if (!c.passed && !c.warning) rep.admissible = false;
        if (!c.passed && c.warning)
            rep.warnings.push_back(c.name + " violated (degenerate boundary case)");
    }
    if (beta.value <= 1.0 + 1e-9)
        rep.warnings.push_back("beta at the boundary value 1 (linear-type profile)");

    return rep;
}

} // namespace grushin
