#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grushin/geometry.hpp"
#include "grushin/profile.hpp"

namespace grushin {

/// Phi(u, v) = (r(u), v), the model quasisymmetry onto the plane.
PlanePoint phi(const Profile& p, GrushinPoint w);

/// Inverse of phi: (r_inverse(x), y).
GrushinPoint phi_inverse(const Profile& p, PlanePoint z);

/// Sup-norm distance max{|dx|, |dy|} used on the image plane.
double sup_norm_dist(PlanePoint z1, PlanePoint z2);

enum class QsBackend { quasidistance_scaled, cc_estimate };
std::string to_string(QsBackend backend);

struct WeakQsTriple {
    GrushinPoint w{};
    GrushinPoint a{};
    GrushinPoint b{};
    double ratio = 0.0;  // sup_norm_dist(phi w, phi a) / sup_norm_dist(phi w, phi b)
};

struct QSReport {
    double c_emp = 0.0;
    long long n_triples = 0;   // requested sample count
    long long n_admitted = 0;  // admitted orientations; distance ties admit both
    long long n_skipped = 0;   // degenerate triples (image denominator zero)
    std::optional<WeakQsTriple> worst_triple;
    QsBackend distance_backend = QsBackend::quasidistance_scaled;
};

struct TripleOutcome {
    std::vector<WeakQsTriple> admitted;  // orientations passing the comparison
    int n_degenerate = 0;                // orientations dropped for a zero denominator
};

/// Admissible orientations of a sampled triple under the quasidistance
/// comparison: (w,a,b) when d(w,a) <= d(w,b) and (w,b,a) when d(w,b) <=
/// d(w,a); an exact tie admits both, which pins c_emp >= 1.
TripleOutcome evaluate_triple(const Profile& p, GrushinPoint w, GrushinPoint a,
                              GrushinPoint b);

struct WeakQsOptions {
    Box box{-5.0, 5.0, -5.0, 5.0};
    long long n_triples = 1000;
    std::uint64_t seed = 1;
    QsBackend backend = QsBackend::quasidistance_scaled;
    double axis_fraction = 0.1;  // share of coordinates snapped to the singular line
    int cc_top = 32;  // cc backend re-checks this many worst triples
    int threads = 1;
};

/// Samples triples (w, a, b) in the box and reports the largest image
/// ratio over triples admitted by backend-distance(w,a) <= backend-
/// distance(w,b). Triple i is drawn from an i-indexed substream, so
/// reports with the same seed agree on their common prefix.
QSReport weak_qs_sample(const Profile& p, const WeakQsOptions& opt);
QSReport weak_qs_sample(const Profile& p, Box box, long long n_triples,
                        std::uint64_t seed,
                        QsBackend backend = QsBackend::quasidistance_scaled);

struct LemmaReport {
    bool applicable = false;  // precondition held and the pair is nondegenerate
    double quasidistance = 0.0;
    double middle = 0.0;      // the d-scaled comparison quantity
    double image_dist = 0.0;  // sup-norm distance of the images
    double ratio_mid_over_img = 0.0;
    double ratio_img_over_mid = 0.0;
    double bound = 0.0;
    bool passed = false;
};

/// Pairs with max{|u|, |u'|} >= d(w, w'): compares d * max{r'(u), r'(u')}
/// with the image distance, bound 2 * beta_hat. Needs beta_hat.
LemmaReport lemma32_check(const Profile& p, GrushinPoint w, GrushinPoint w2);

/// Pairs with max{|u|, |u'|} <= d(w, w'): compares r'(d) * d with the
/// image distance, bound max{2, 2 * m_hat * beta_hat}. Needs both
/// certificates.
LemmaReport lemma33_check(const Profile& p, GrushinPoint w, GrushinPoint w2);

} // namespace grushin
