#pragma once

#include <complex>

namespace grushin {

/// Point of the Grushin plane in coordinates (u, v).  The vertical line
/// u = 0 is the singular line of the frame.
struct GrushinPoint {
    double u = 0.0;
    double v = 0.0;
    friend bool operator==(const GrushinPoint&, const GrushinPoint&) = default;
};

/// Point of the complex plane, identified with x + iy.
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;

    std::complex<double> as_complex() const { return {x, y}; }
    static PlanePoint from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }
    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Axis-aligned box [u_lo, u_hi] x [v_lo, v_hi].
struct Box {
    double u_lo = 0.0;
    double u_hi = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
};

/// Rectangular evaluation grid: a box together with inclusive node counts
/// along each side (nu x nv points, endpoints included).
struct Region {
    double u_lo = 0.0;
    double u_hi = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    int nu = 2;
    int nv = 2;
};

/// Axis-aligned square given by its lower-left corner and side length.
struct Square {
    GrushinPoint corner;
    double side = 1.0;
};

} // namespace grushin
