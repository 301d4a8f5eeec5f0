#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grushin/geometry.hpp"
#include "grushin/plane_maps.hpp"
#include "grushin/profile.hpp"

namespace grushin {

/// Self-map of the Grushin plane, either conjugated from a plane map
/// (g = Phi^{-1} o f o Phi) or given by raw coordinate evaluators.
struct GrushinMap {
    enum class Kind { conjugated_plane_map, coordinate_evaluators };
    Kind kind = Kind::coordinate_evaluators;
    std::string name;
    Profile profile;
    std::optional<PlaneMap> plane_map;  // present for the conjugated kind
    std::function<double(double, double)> g1, g2;
};

GrushinMap conjugated_map(const Profile& p, PlaneMap f);
GrushinMap evaluator_map(const Profile& p, std::string name,
                         std::function<double(double, double)> g1,
                         std::function<double(double, double)> g2);

struct Matrix2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
    double det() const { return a11 * a22 - a12 * a21; }
    double frobenius() const;
};
Matrix2 operator-(const Matrix2& lhs, const Matrix2& rhs);

struct DerivativeSample {
    GrushinPoint at{};
    double fd_step = 0.0;
    // frame derivatives of the coordinates: U = d/du, V = r'(u) d/dv
    double Ug1 = 0.0, Vg1 = 0.0, Ug2 = 0.0, Vg2 = 0.0;
    // W = (U - iV)/2 and its conjugate applied to Phi o g
    std::complex<double> W_tilde{}, Wbar_tilde{};
    std::optional<std::complex<double>> nu;  // Wbar/W when |W| > 1e-8
    Matrix2 Drg{};
    bool drg_defined = false;  // false when r'(g1) vanishes under the row scaling
    double r_prime_g1 = 0.0;
};

/// Central differences with anisotropic steps: u-step h, v-step h r'(u),
/// so the V column realizes r'(u) d/dv without dividing by r'. Requires
/// |at.u| > h to keep the stencil off the singular line.
DerivativeSample frame_derivative(const GrushinMap& m, GrushinPoint at, double h);

std::optional<std::complex<double>> grushin_beltrami_nu(const GrushinMap& m,
                                                        GrushinPoint at, double h);

/// Wirtinger quotient (df/dzbar) / (df/dz) by central differences;
/// undefined when |df/dz| <= 1e-8.
std::optional<std::complex<double>> classical_beltrami_mu(const PlaneMap& f,
                                                          PlanePoint z, double h);

struct ConsistencyReport {
    double max_deviation = 0.0;
    GrushinPoint worst{};
    long long n_evaluated = 0;
    long long n_skipped = 0;
    double fd_step = 0.0;
    double tube_margin = 0.0;
};

/// Max over the grid of |nu(w) - mu(Phi(w))| for a conjugated map; points
/// inside the tubes |u| < margin or |g1| < margin are skipped and counted.
ConsistencyReport conjugation_consistency(const GrushinMap& m, Region grid, double h,
                                          double tube_margin = 0.05);

struct ConformalityCertificate {
    bool passed = false;
    double max_diag_dev = 0.0;     // |Drg11 - Drg22|
    double max_offdiag_dev = 0.0;  // |Drg12 + Drg21|
    double min_det = 0.0;
    double max_abs_nu = 0.0;
    GrushinPoint worst{};
    long long n_grid = 0;     // points that passed the matrix checks' stencil
    long long n_skipped = 0;  // points inside the |u| tube
    long long n_probes = 0;   // singular-set limit probes run
    std::vector<std::string> failures;
    double fd_step = 0.0;
    double tube_margin = 0.0;
    double tol = 0.0;
};

/// Grid check that Drg is a conformal matrix (equal diagonal, antisymmetric
/// off-diagonal, det > tol). Grid points mapped near the singular image
/// line, and detected crossings of {g1 = 0} between neighbors, trigger
/// limit probes along 8 directions: the frame derivative must converge to
/// a common nonzero limit, otherwise the certificate fails. When the
/// region straddles u = 0 the singular line must map into itself at
/// sampled axis points.
ConformalityCertificate conformality_test(const GrushinMap& m, Region region, double h,
                                          double tol = 1e-5, double tube_margin = 0.05);

} // namespace grushin
