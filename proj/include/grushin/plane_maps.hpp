#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace grushin {

/// Named self-map of the plane, addressable from the CLI by
/// "family:param,param,...".
struct PlaneMap {
    std::string family;
    std::vector<double> params;
    std::string name;  // canonical descriptor, parse_plane_map round-trips it
    std::function<std::complex<double>(std::complex<double>)> f;
};

PlaneMap plane_identity();
PlaneMap plane_translation(double a, double b);
PlaneMap plane_dilation(double c);
PlaneMap plane_moebius(std::complex<double> a, std::complex<double> b,
                       std::complex<double> c, std::complex<double> d);
PlaneMap plane_antiholomorphic_mix(double kappa);  // z + kappa * conj(z)
PlaneMap plane_payne_closed_form(int k, double s);
PlaneMap plane_f3star(double s);  // (is + z) / (1 + isz)

/// "identity", "translation:0.5,0.25", "dilation:2",
/// "moebius:a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im", "antiholo:0.3",
/// "payne:3,0.1", "f3star:0.5".
PlaneMap parse_plane_map(const std::string& text);

/// z^n by binary exponentiation, n >= 0; exact integer power avoids
/// principal-branch seams.
std::complex<double> ipow(std::complex<double> z, long long n);

/// Shared core of the time-s Payne plane maps. For k >= 3 the map is
/// z / w_c^{1/(alpha-1)} with w_c = (1-alpha)(-iz)^{alpha-1} s + 1 and
/// alpha = 2^{k-2}; k = 1 translates by is, k = 2 scales by e^s (w_c = 1).
struct PayneParts {
    std::complex<double> w_c{1.0, 0.0};
    std::complex<double> value{};
    bool tiny_denominator = false;  // |w_c| below 1e-12 * (1 + |z| s)
};
PayneParts payne_plane_parts(int k, double s, std::complex<double> z);

} // namespace grushin
