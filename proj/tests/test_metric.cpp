#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "grushin/errors.hpp"
#include "grushin/metric.hpp"
#include "grushin/numerics.hpp"
#include "grushin/profile.hpp"

#include "support.hpp"

using namespace grushin;

namespace {

Profile with_doubling(Profile p) {
    p.m_hat = estimate_doubling(p, kDefaultCertRange, kDefaultCertSamples).value;
    return p;
}

} // namespace

TEST_CASE("solve_M matches closed forms") {
    auto classical = make_profile(ProfileFamily::classical, {});
    CHECK(solve_M(classical, 0.0) == 0.0);
    // M r'(M) = M^2 = 4
    CHECK(solve_M(classical, 4.0) == doctest::Approx(2.0).epsilon(1e-9));
    auto cubic = make_profile(ProfileFamily::power, {{"alpha", 3.0}});
    // M r'(M) = M^4 = 16
    CHECK(solve_M(cubic, 16.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(solve_M(classical, -1.0), std::invalid_argument);
}

TEST_CASE("solve_M residual stays within tolerance across scales") {
    const auto profiles = {make_profile(ProfileFamily::classical, {}),
                           make_profile(ProfileFamily::power, {{"alpha", 3.0}}),
                           make_profile(ProfileFamily::log_power, {{"p", 2.0}})};
    for (const auto& p : profiles) {
        for (double dv : num::logspace(1e-8, 1e8, 100)) {
            const double M = solve_M(p, dv);
            CHECK(M > 0.0);
            CHECK(std::abs(M * p.r_prime(M) - dv) <= 1e-10 * (1.0 + dv));
        }
    }
}

TEST_CASE("quasidistance branches and values") {
    auto p = make_profile(ProfileFamily::classical, {});

    SUBCASE("vertical pair away from the axis, M wins") {
        auto q = quasidistance(p, {1.0, 0.0}, {1.0, 4.0});
        CHECK(q.value == doctest::Approx(2.0).epsilon(1e-9));
        REQUIRE(q.M.has_value());
        CHECK(*q.M == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(q.branch == QuasidistanceBranch::M_dominates);
    }
    SUBCASE("vertical pair on the axis") {
        auto q = quasidistance(p, {0.0, 0.0}, {0.0, 1.0});
        CHECK(q.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(q.branch == QuasidistanceBranch::both_on_axis);
    }
    SUBCASE("horizontal pair") {
        auto q = quasidistance(p, {0.0, 0.0}, {3.0, 0.0});
        CHECK(q.value == 3.0);
        CHECK_FALSE(q.M.has_value());
        CHECK(q.branch == QuasidistanceBranch::horizontal_dominates);
    }
    SUBCASE("short vertical hop where the ratio wins") {
        auto q = quasidistance(p, {2.0, 0.0}, {2.0, 0.5});
        CHECK(q.value == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(q.branch == QuasidistanceBranch::ratio_dominates);
    }
    SUBCASE("branch names") {
        CHECK(to_string(QuasidistanceBranch::both_on_axis) == "both_on_axis");
        CHECK(to_string(QuasidistanceBranch::M_dominates) == "M_dominates");
    }
}

TEST_CASE("quasidistance is a symmetric quasidistance") {
    auto p = make_profile(ProfileFamily::power, {{"alpha", 2.0}});
    num::SplitMix64 rng(20240809ULL);
    for (int i = 0; i < 200; ++i) {
        GrushinPoint a{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
        GrushinPoint b{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
        const double dab = quasidistance(p, a, b).value;
        const double dba = quasidistance(p, b, a).value;
        CHECK(dab == dba);
        CHECK(dab >= 0.0);
        CHECK(quasidistance(p, a, a).value == 0.0);
        if (!(a == b)) CHECK(dab > 0.0);
    }
}

TEST_CASE("quasidistance is invariant under vertical shifts and u-reflection") {
    auto p = make_profile(ProfileFamily::log_power, {{"p", 1.5}});
    num::SplitMix64 rng(77ULL);
    for (int i = 0; i < 100; ++i) {
        GrushinPoint a{rng.next_unit() * 8.0 - 4.0, rng.next_unit() * 8.0 - 4.0};
        GrushinPoint b{rng.next_unit() * 8.0 - 4.0, rng.next_unit() * 8.0 - 4.0};
        const double base = quasidistance(p, a, b).value;
        const double shifted =
            quasidistance(p, {a.u, a.v + 13.25}, {b.u, b.v + 13.25}).value;
        const double mirrored = quasidistance(p, {-a.u, a.v}, {-b.u, b.v}).value;
        CHECK(shifted == doctest::Approx(base).epsilon(1e-12));
        CHECK(mirrored == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("path_length handles exact legs, the axis, and crossings") {
    auto p = make_profile(ProfileFamily::classical, {});
    CHECK(path_length(p, {{ {1.0, 0.0}, {3.0, 0.0} }}) == 2.0);
    CHECK(path_length(p, {{ {1.0, 0.0}, {1.0, 5.0} }}) == doctest::Approx(5.0));
    CHECK(path_length(p, {{ {2.0, 0.0}, {2.0, 1.0} }}) == doctest::Approx(0.5));
    CHECK(path_length(p, {{ {0.0, 0.0}, {0.0, 1.0} }}) ==
          std::numeric_limits<double>::infinity());
    // Horizontal crossings are exact; sloped crossings split at the axis
    // and stay finite under the quadrature.
    CHECK(path_length(p, {{ {-1.0, 0.0}, {1.0, 0.0} }}) == 2.0);
    const double sloped = path_length(p, {{ {-1.0, 0.0}, {1.0, 1.0} }});
    CHECK(std::isfinite(sloped));
    CHECK(sloped >= 2.0);
    CHECK_THROWS_AS(path_length(p, HorizontalPath{{{0.0, 0.0}}}),
                    std::invalid_argument);
}

TEST_CASE("make_path stores the computed length") {
    auto p = make_profile(ProfileFamily::classical, {});
    auto path = make_path(p, {{1.0, 0.0}, {1.0, 5.0}});
    CHECK(path.length_r == doctest::Approx(5.0));
    CHECK(path.nodes.size() == 2);
}

TEST_CASE("L-shape upper bound on the axis pair hits the known optimum") {
    auto p = make_profile(ProfileFamily::classical, {});
    auto [value, path] = cc_upper_lshape(p, {0.0, 0.0}, {0.0, 1.0});
    // Pivot cost 2t + 1/t is minimized at t = 1/sqrt(2) with value 2 sqrt(2).
    CHECK(value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
    REQUIRE(path.nodes.size() == 4);
    CHECK(std::abs(path.nodes[1].u) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(path.nodes[1].u == path.nodes[2].u);
    CHECK(value == path.length_r);
}

TEST_CASE("L-shape degenerates to the straight segment when dv = 0") {
    auto p = make_profile(ProfileFamily::power, {{"alpha", 3.0}});
    auto [value, path] = cc_upper_lshape(p, {1.0, 2.0}, {3.0, 2.0});
    CHECK(value == 2.0);
    CHECK(path.nodes.size() == 4);
}

TEST_CASE("L-shape value is comparable to the quasidistance") {
    for (const auto& p : {with_doubling(make_profile(ProfileFamily::classical, {})),
                          with_doubling(make_profile(ProfileFamily::power, {{"alpha", 2.0}})),
                          with_doubling(make_profile(ProfileFamily::log_power, {{"p", 1.5}}))}) {
        num::SplitMix64 rng(424242ULL);
        for (int i = 0; i < 200; ++i) {
            GrushinPoint a{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
            GrushinPoint b{rng.next_unit() * 10.0 - 5.0, rng.next_unit() * 10.0 - 5.0};
            const double d = quasidistance(p, a, b).value;
            const double up = cc_upper_lshape(p, a, b).first;
            CHECK(up <= 5.0 * d * (1.0 + 1e-9) + 1e-300);
            CHECK(up >= d / (2.0 * *p.m_hat) * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("refined estimate improves on the L-shape for the axis pair") {
    auto p = make_profile(ProfileFamily::classical, {});
    const double lshape = cc_upper_lshape(p, {0.0, 0.0}, {0.0, 1.0}).first;
    auto [value, path] = cc_estimate(p, {0.0, 0.0}, {0.0, 1.0});
    CHECK(value <= lshape + 1e-12);
    CHECK(value <= lshape - 1e-3);   // the sweeps find a genuinely shorter path
    CHECK(value >= 0.25);            // d / (2 m) with d = 1, m = 2
    CHECK(path.nodes.size() >= 4);
    CHECK(path.nodes.front() == GrushinPoint{0.0, 0.0});
    CHECK(path.nodes.back() == GrushinPoint{0.0, 1.0});
}

TEST_CASE("refined estimate keeps exact horizontal geodesics") {
    auto p = make_profile(ProfileFamily::classical, {});
    auto [value, path] = cc_estimate(p, {1.0, 0.0}, {3.0, 0.0});
    CHECK(value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(value >= 2.0 * (1.0 - 1e-12));
    CHECK(path.nodes.front() == GrushinPoint{1.0, 0.0});
    CHECK(path.nodes.back() == GrushinPoint{3.0, 0.0});
}

TEST_CASE("refined estimate input validation and degenerate pair") {
    auto p = make_profile(ProfileFamily::classical, {});
    CHECK_THROWS_AS(cc_estimate(p, {0.0, 0.0}, {1.0, 1.0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(cc_estimate(p, {0.0, 0.0}, {1.0, 1.0}, 11, -1), std::invalid_argument);
    auto [value, path] = cc_estimate(p, {2.0, 3.0}, {2.0, 3.0});
    CHECK(value == 0.0);
    CHECK(path.nodes.size() == 2);
}

TEST_CASE("refined estimate never exceeds the L-shape on random pairs") {
    auto p = make_profile(ProfileFamily::power, {{"alpha", 2.0}});
    num::SplitMix64 rng(90210ULL);
    for (int i = 0; i < 25; ++i) {
        GrushinPoint a{rng.next_unit() * 6.0 - 3.0, rng.next_unit() * 6.0 - 3.0};
        GrushinPoint b{rng.next_unit() * 6.0 - 3.0, rng.next_unit() * 6.0 - 3.0};
        const double lshape = cc_upper_lshape(p, a, b).first;
        const auto [value, path] = cc_estimate(p, a, b);
        CHECK(value <= lshape + 1e-12);
        CHECK(value >= std::abs(a.u - b.u) * (1.0 - 1e-12));
    }
}

TEST_CASE("comparability_check reports two-sided bounds") {
    auto p = with_doubling(make_profile(ProfileFamily::classical, {}));
    auto rep = comparability_check(p, {0.5, 0.2}, {-1.0, 3.0});
    CHECK(rep.passed);
    CHECK(rep.quasidistance > 0.0);
    CHECK(rep.cc_estimate <= rep.cc_lshape + 1e-12);
    CHECK(rep.ratio_cc_over_d <= 5.0 * (1.0 + rep.tol));
    CHECK(rep.ratio_d_over_cc <= rep.lower_factor * (1.0 + rep.tol));
    CHECK(rep.lower_factor == doctest::Approx(4.0).epsilon(1e-6));

    auto bare = make_profile(ProfileFamily::classical, {});
    CHECK_THROWS_AS(comparability_check(bare, {0.0, 0.0}, {1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("covering_number frozen counts for the classical profile") {
    auto p = make_profile(ProfileFamily::classical, {});
    // Unit square touching the singular line: rows pitch eps, row j gets
    // ceil(1 / (eps max{r'(u_j), r'(eps)})) centers; at eps = 1/8 the row
    // counts are 64,43,26,19,15,12,10,9.
    CHECK(covering_number(p, {{0.0, 0.0}, 1.0}, 0.125) == 198);
    // Control square at distance 2 from the line behaves Euclidean.
    CHECK(covering_number(p, {{2.0, 0.0}, 1.0}, 0.125) == 29);
    CHECK(covering_number(p, {{0.0, 0.0}, 1.0}, 1.0) == 1);
}

TEST_CASE("covering_number input validation and refusal") {
    auto p = make_profile(ProfileFamily::classical, {});
    CHECK_THROWS_AS(covering_number(p, {{0.0, 0.0}, 1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(covering_number(p, {{0.0, 0.0}, 1.0}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(covering_number(p, {{0.0, 0.0}, 1.0}, 1e-5), RefusalError);
}

TEST_CASE("covering_number grows like eps^-2 log(1/eps) near the line") {
    auto p = make_profile(ProfileFamily::classical, {});
    double prev = 0.0;
    for (int k = 3; k <= 6; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const double n = static_cast<double>(covering_number(p, {{0.0, 0.0}, 1.0}, eps));
        const double normalized = n * eps * eps / std::log(1.0 / eps);
        if (prev > 0.0) {
            CHECK(normalized / prev < 2.0);
            CHECK(prev / normalized < 2.0);
        }
        prev = normalized;
    }
}

TEST_CASE("linear profile keeps the metric Euclidean") {
    auto p = testsupport::linear_profile();
    auto q = quasidistance(p, {0.0, 0.0}, {0.0, 1.0});
    // r' = 1 everywhere: no singular line, M and the ratio tie at |dv|.
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.branch == QuasidistanceBranch::M_dominates);
    CHECK(path_length(p, {{ {0.0, 0.0}, {0.0, 1.0} }}) == doctest::Approx(1.0));
}
