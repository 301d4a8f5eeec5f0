#include "grushin/plane_maps.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace grushin {

namespace {

using cplx = std::complex<double>;

std::string join_params(const std::string& family, const std::vector<double>& params) {
    std::string out = family;
    for (std::size_t i = 0; i < params.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", params[i]);
        out += (i == 0 ? ':' : ',');
        out += buf;
    }
    return out;
}

PlaneMap build(std::string family, std::vector<double> params,
               std::function<cplx(cplx)> f) {
    PlaneMap m;
    m.family = std::move(family);
    m.params = std::move(params);
    m.name = join_params(m.family, m.params);
    m.f = std::move(f);
    return m;
}

void require_finite(const std::vector<double>& params, const char* who) {
    for (double x : params)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(who) + ": parameters must be finite");
}

} // namespace

std::complex<double> ipow(std::complex<double> z, long long n) {
    if (n < 0) throw std::invalid_argument("ipow: negative exponent");
    cplx acc{1.0, 0.0};
    while (n > 0) {
        if (n & 1) acc *= z;
        z *= z;
        n >>= 1;
    }
    return acc;
}

PayneParts payne_plane_parts(int k, double s, std::complex<double> z) {
    if (k < 1 || k > 40)
        throw std::invalid_argument("payne_plane_parts: k must lie in [1, 40]");
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("payne_plane_parts: s must be finite and >= 0");
    PayneParts parts;
    if (k == 1) {
        parts.value = z + cplx{0.0, s};
        return parts;
    }
    if (k == 2) {
        parts.value = std::exp(s) * z;
        return parts;
    }
    const long long alpha = 1LL << (k - 2);
    const cplx pw = ipow(cplx{0.0, -1.0} * z, alpha - 1);
    parts.w_c = (1.0 - static_cast<double>(alpha)) * s * pw + 1.0;
    parts.tiny_denominator = std::abs(parts.w_c) < 1e-12 * (1.0 + std::abs(z) * s);
    if (parts.tiny_denominator) return parts;
    const cplx denom = alpha == 2
                           ? parts.w_c
                           : std::pow(parts.w_c, 1.0 / static_cast<double>(alpha - 1));
    parts.value = z / denom;
    return parts;
}

PlaneMap plane_identity() {
    return build("identity", {}, [](cplx z) { return z; });
}

PlaneMap plane_translation(double a, double b) {
    require_finite({a, b}, "plane_translation");
    return build("translation", {a, b}, [a, b](cplx z) { return z + cplx{a, b}; });
}

PlaneMap plane_dilation(double c) {
    require_finite({c}, "plane_dilation");
    if (c == 0.0) throw std::invalid_argument("plane_dilation: factor must be nonzero");
    return build("dilation", {c}, [c](cplx z) { return c * z; });
}

PlaneMap plane_moebius(std::complex<double> a, std::complex<double> b,
                       std::complex<double> c, std::complex<double> d) {
    std::vector<double> params{a.real(), a.imag(), b.real(), b.imag(),
                               c.real(), c.imag(), d.real(), d.imag()};
    require_finite(params, "plane_moebius");
    if (std::abs(a * d - b * c) < 1e-300)
        throw std::invalid_argument("plane_moebius: determinant ad - bc vanishes");
    return build("moebius", std::move(params),
                 [a, b, c, d](cplx z) { return (a * z + b) / (c * z + d); });
}

PlaneMap plane_antiholomorphic_mix(double kappa) {
    require_finite({kappa}, "plane_antiholomorphic_mix");
    return build("antiholomorphic_mix", {kappa},
                 [kappa](cplx z) { return z + kappa * std::conj(z); });
}

PlaneMap plane_payne_closed_form(int k, double s) {
    payne_plane_parts(k, s, cplx{0.0, 0.0});  // validates k and s
    return build("payne_closed_form", {static_cast<double>(k), s},
                 [k, s](cplx z) { return payne_plane_parts(k, s, z).value; });
}

PlaneMap plane_f3star(double s) {
    require_finite({s}, "plane_f3star");
    return build("payne_variant_f3star", {s}, [s](cplx z) {
        return (cplx{0.0, s} + z) / (1.0 + cplx{0.0, s} * z);
    });
}

PlaneMap parse_plane_map(const std::string& text) {
    std::string family = text;
    std::vector<double> params;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        family = text.substr(0, colon);
        std::string rest = text.substr(colon + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const std::size_t comma = rest.find(',', pos);
            const std::string tok =
                rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            try {
                std::size_t used = 0;
                params.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw std::invalid_argument("parse_plane_map: bad parameter '" + tok +
                                            "' in '" + text + "'");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    auto arity = [&](std::size_t n) {
        if (params.size() != n)
            throw std::invalid_argument("parse_plane_map: '" + family + "' expects " +
                                        std::to_string(n) + " parameters");
    };
    if (family == "identity") {
        arity(0);
        return plane_identity();
    }
    if (family == "translation") {
        arity(2);
        return plane_translation(params[0], params[1]);
    }
    if (family == "dilation") {
        arity(1);
        return plane_dilation(params[0]);
    }
    if (family == "moebius") {
        arity(8);
        return plane_moebius({params[0], params[1]}, {params[2], params[3]},
                             {params[4], params[5]}, {params[6], params[7]});
    }
    if (family == "antiholo" || family == "antiholomorphic_mix") {
        arity(1);
        return plane_antiholomorphic_mix(params[0]);
    }
    if (family == "payne" || family == "payne_closed_form") {
        arity(2);
        const int k = static_cast<int>(params[0]);
        if (static_cast<double>(k) != params[0])
            throw std::invalid_argument("parse_plane_map: payne k must be an integer");
        return plane_payne_closed_form(k, params[1]);
    }
    if (family == "f3star" || family == "payne_variant_f3star") {
        arity(1);
        return plane_f3star(params[0]);
    }
    throw std::invalid_argument("parse_plane_map: unknown map '" + family + "'");
}

} // namespace grushin
