#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "grushin/metric.hpp"
#include "grushin/numerics.hpp"
#include "grushin/profile.hpp"
#include "grushin/symmetry.hpp"

#include "support.hpp"

using namespace grushin;

namespace {

Profile certified(Profile p) {
    p.beta_hat = estimate_beta(p, kDefaultCertRange, kDefaultCertSamples).value;
    p.m_hat = estimate_doubling(p, kDefaultCertRange, kDefaultCertSamples).value;
    return p;
}

} // namespace

TEST_CASE("phi evaluates r in the first coordinate") {
    auto classical = make_profile(ProfileFamily::classical, {});
    CHECK(phi(classical, {2.0, 3.0}).x == 2.0);
    CHECK(phi(classical, {2.0, 3.0}).y == 3.0);
    CHECK(phi(classical, {-2.0, 0.0}).x == -2.0);
    CHECK(phi(classical, {-2.0, 0.0}).y == 0.0);
    auto log2 = make_profile(ProfileFamily::log_power, {{"p", 2.0}});
    CHECK(phi(log2, {1.0, 5.0}).x == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(phi(log2, {1.0, 5.0}).y == 5.0);
}

TEST_CASE("phi_inverse inverts phi") {
    auto classical = make_profile(ProfileFamily::classical, {});
    auto w = phi_inverse(classical, {2.0, 3.0});
    CHECK(w.u == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.v == 3.0);
    auto neg = phi_inverse(classical, {-4.5, 0.0});
    CHECK(neg.u == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(phi_inverse(classical, {0.0, 0.0}).u == 0.0);

    for (const auto& p : {make_profile(ProfileFamily::classical, {}),
                          make_profile(ProfileFamily::power, {{"alpha", 2.0}}),
                          make_profile(ProfileFamily::log_power, {{"p", 1.5}})}) {
        num::SplitMix64 rng(5150ULL);
        for (int i = 0; i < 50; ++i) {
            const double u = rng.next_unit() * 2e3 - 1e3;
            const double v = rng.next_unit() * 2e3 - 1e3;
            const auto round = phi_inverse(p, phi(p, {u, v}));
            CHECK(round.u == doctest::Approx(u).epsilon(1e-9));
            CHECK(round.v == v);
            const auto image = phi(p, phi_inverse(p, {u, v}));
            CHECK(image.x == doctest::Approx(u).epsilon(1e-9));
        }
    }
}

TEST_CASE("sup_norm_dist basics") {
    CHECK(sup_norm_dist({0.0, 0.0}, {3.0, 4.0}) == 4.0);
    CHECK(sup_norm_dist({1.0, 1.0}, {1.0, 1.0}) == 0.0);
    CHECK(sup_norm_dist({-1.0, 2.0}, {2.0, 0.0}) == 3.0);
}

TEST_CASE("phi is monotone in u for fixed v") {
    auto p = make_profile(ProfileFamily::power, {{"alpha", 3.0}});
    double prev = -std::numeric_limits<double>::infinity();
    for (double u : num::linspace(-4.0, 4.0, 81)) {
        const double x = phi(p, {u, 0.5}).x;
        CHECK(x > prev);
        prev = x;
    }
}

TEST_CASE("collinear horizontal triple has the closed-form ratio") {
    auto p = make_profile(ProfileFamily::classical, {});
    const GrushinPoint w{0.0, 0.0}, a{1.0, 0.0}, b{2.0, 0.0};
    CHECK(quasidistance(p, w, a).value <= quasidistance(p, w, b).value);
    auto outcome = evaluate_triple(p, w, a, b);
    REQUIRE(outcome.admitted.size() == 1);
    CHECK(outcome.admitted[0].ratio == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("evaluate_triple admits both orientations on an exact tie") {
    auto p = make_profile(ProfileFamily::classical, {});
    // Both distances equal 2 exactly (horizontal branch both ways).
    const GrushinPoint w{1.0, 0.0}, a{3.0, 1.0}, b{-1.0, 1.0};
    CHECK(quasidistance(p, w, a).value == quasidistance(p, w, b).value);
    auto outcome = evaluate_triple(p, w, a, b);
    REQUIRE(outcome.admitted.size() == 2);
    CHECK(outcome.admitted[0].ratio == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(outcome.admitted[1].ratio == doctest::Approx(0.25).epsilon(1e-12));
    const double c_emp = std::max(outcome.admitted[0].ratio, outcome.admitted[1].ratio);
    CHECK(c_emp >= 1.0);
}

TEST_CASE("evaluate_triple skips degenerate denominators") {
    auto p = make_profile(ProfileFamily::classical, {});
    // Fully coincident triple: every orientation has a zero denominator.
    auto collapsed = evaluate_triple(p, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
    CHECK(collapsed.admitted.empty());
    CHECK(collapsed.n_degenerate == 1);
    // b = w alone flips into the (w, b, a) orientation with ratio 0.
    auto outcome = evaluate_triple(p, {1.0, 1.0}, {2.0, 0.0}, {1.0, 1.0});
    REQUIRE(outcome.admitted.size() == 1);
    CHECK(outcome.admitted[0].ratio == 0.0);
    CHECK(outcome.n_degenerate == 0);
}

TEST_CASE("weak_qs_sample reports a stable finite constant") {
    auto p = make_profile(ProfileFamily::classical, {});
    WeakQsOptions opt;
    opt.n_triples = 2000;
    opt.seed = 7;
    auto rep = weak_qs_sample(p, opt);
    CHECK(rep.n_triples == 2000);
    CHECK(rep.n_admitted >= 1000);
    CHECK(rep.c_emp > 0.0);
    CHECK(std::isfinite(rep.c_emp));
    REQUIRE(rep.worst_triple.has_value());
    const auto& t = *rep.worst_triple;
    const double recomputed = sup_norm_dist(phi(p, t.w), phi(p, t.a)) /
                              sup_norm_dist(phi(p, t.w), phi(p, t.b));
    CHECK(rep.c_emp == doctest::Approx(recomputed).epsilon(1e-12));
    CHECK(rep.c_emp == t.ratio);
}

TEST_CASE("weak_qs_sample c_emp is monotone under nested seeds") {
    auto p = make_profile(ProfileFamily::classical, {});
    WeakQsOptions small;
    small.n_triples = 500;
    small.seed = 11;
    WeakQsOptions large = small;
    large.n_triples = 2000;
    const auto rs = weak_qs_sample(p, small);
    const auto rl = weak_qs_sample(p, large);
    CHECK(rl.c_emp >= rs.c_emp);
}

TEST_CASE("weak_qs_sample is deterministic and thread-count independent") {
    auto p = make_profile(ProfileFamily::power, {{"alpha", 2.0}});
    WeakQsOptions opt;
    opt.n_triples = 1500;
    opt.seed = 13;
    const auto serial = weak_qs_sample(p, opt);
    opt.threads = 4;
    const auto parallel = weak_qs_sample(p, opt);
    CHECK(serial.c_emp == parallel.c_emp);
    CHECK(serial.n_admitted == parallel.n_admitted);
    CHECK(serial.n_skipped == parallel.n_skipped);
    REQUIRE(parallel.worst_triple.has_value());
    CHECK(serial.worst_triple->w == parallel.worst_triple->w);
    CHECK(serial.worst_triple->a == parallel.worst_triple->a);
    CHECK(serial.worst_triple->b == parallel.worst_triple->b);
}

TEST_CASE("weak_qs_sample cc backend re-checks the worst candidates") {
    auto p = make_profile(ProfileFamily::classical, {});
    WeakQsOptions opt;
    opt.n_triples = 300;
    opt.seed = 7;
    opt.backend = QsBackend::cc_estimate;
    opt.cc_top = 8;
    const auto rep = weak_qs_sample(p, opt);
    CHECK(rep.distance_backend == QsBackend::cc_estimate);
    CHECK(rep.c_emp > 0.0);
    REQUIRE(rep.worst_triple.has_value());
    // The surviving worst triple is genuinely cc-admissible.
    const double cc_wa = cc_estimate(p, rep.worst_triple->w, rep.worst_triple->a).first;
    const double cc_wb = cc_estimate(p, rep.worst_triple->w, rep.worst_triple->b).first;
    CHECK(cc_wa <= cc_wb);

    WeakQsOptions plain = opt;
    plain.backend = QsBackend::quasidistance_scaled;
    const auto base = weak_qs_sample(p, plain);
    CHECK(rep.c_emp <= base.c_emp);
}

TEST_CASE("weak_qs_sample validates inputs") {
    auto p = make_profile(ProfileFamily::classical, {});
    WeakQsOptions opt;
    opt.n_triples = 0;
    CHECK_THROWS_AS(weak_qs_sample(p, opt), std::invalid_argument);
    opt.n_triples = 10;
    opt.axis_fraction = 1.5;
    CHECK_THROWS_AS(weak_qs_sample(p, opt), std::invalid_argument);
}

TEST_CASE("lemma32_check matches hand-evaluated examples") {
    auto p = certified(make_profile(ProfileFamily::classical, {}));
    auto rep = lemma32_check(p, {2.0, 0.0}, {2.0, 1.0});
    REQUIRE(rep.applicable);
    CHECK(rep.quasidistance == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep.middle == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.image_dist == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.ratio_mid_over_img == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.bound == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(rep.passed);

    CHECK_FALSE(lemma32_check(p, {1.0, 1.0}, {1.0, 1.0}).applicable);
    // Axis pair: max{|u|,|u'|} = 0 < d, rejected not failed.
    CHECK_FALSE(lemma32_check(p, {0.0, 0.0}, {0.0, 1.0}).applicable);

    auto bare = make_profile(ProfileFamily::classical, {});
    CHECK_THROWS_AS(lemma32_check(bare, {1.0, 0.0}, {2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("lemma33_check matches hand-evaluated examples") {
    auto p = certified(make_profile(ProfileFamily::classical, {}));
    auto axis = lemma33_check(p, {0.0, 0.0}, {0.0, 1.0});
    REQUIRE(axis.applicable);
    CHECK(axis.quasidistance == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(axis.middle == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(axis.ratio_mid_over_img == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(axis.passed);

    auto sym = lemma33_check(p, {1.0, 0.0}, {-1.0, 0.0});
    REQUIRE(sym.applicable);
    CHECK(sym.quasidistance == 2.0);
    CHECK(sym.middle == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sym.image_dist == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sym.ratio_mid_over_img == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sym.bound == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(sym.passed);

    CHECK_FALSE(lemma33_check(p, {3.0, 0.0}, {3.0, 0.1}).applicable);

    auto bare = make_profile(ProfileFamily::classical, {});
    CHECK_THROWS_AS(lemma33_check(bare, {0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("every distinct pair lands in exactly one lemma branch or both at equality") {
    auto p = certified(make_profile(ProfileFamily::power, {{"alpha", 2.0}}));
    num::SplitMix64 rng(31337ULL);
    int n32 = 0, n33 = 0;
    for (int i = 0; i < 200; ++i) {
        GrushinPoint a{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
        GrushinPoint b{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
        auto r32 = lemma32_check(p, a, b);
        auto r33 = lemma33_check(p, a, b);
        const double umax = std::max(std::abs(a.u), std::abs(b.u));
        const bool tie = umax == r32.quasidistance;
        if (tie)
            CHECK((r32.applicable && r33.applicable));
        else
            CHECK(r32.applicable != r33.applicable);
        if (r32.applicable) {
            ++n32;
            CHECK(r32.passed);
        }
        if (r33.applicable) {
            ++n33;
            CHECK(r33.passed);
        }
    }
    CHECK(n32 > 0);
    CHECK(n33 > 0);
}

TEST_CASE("lemma bounds hold across profiles on admissible pairs") {
    for (const auto& p :
         {certified(make_profile(ProfileFamily::classical, {})),
          certified(make_profile(ProfileFamily::power, {{"alpha", 3.0}})),
          certified(make_profile(ProfileFamily::log_power, {{"p", 2.0}}))}) {
        num::SplitMix64 rng(808ULL);
        for (int i = 0; i < 150; ++i) {
            GrushinPoint a{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
            GrushinPoint b{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
            auto r32 = lemma32_check(p, a, b);
            if (r32.applicable) CHECK(r32.passed);
            auto r33 = lemma33_check(p, a, b);
            if (r33.applicable) CHECK(r33.passed);
        }
    }
}
