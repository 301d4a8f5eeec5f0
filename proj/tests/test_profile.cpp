#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "grushin/profile.hpp"
#include "support.hpp"

using namespace grushin;

TEST_CASE("classical profile evaluators") {
    Profile p = make_profile(ProfileFamily::classical);
    CHECK(p.r(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.r_prime(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.r_inverse(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.r(-3.0) == doctest::Approx(-4.5).epsilon(1e-15));
    CHECK(p.r(0.0) == 0.0);
    CHECK(p.r_prime(0.0) == 0.0);
    CHECK(!p.beta_hat.has_value());
    CHECK(!p.m_hat.has_value());
    CHECK(p.serializable());
}

TEST_CASE("power profile normalization: r' is |u|^alpha") {
    Profile p = make_profile(ProfileFamily::power, {{"alpha", 3.0}});
    CHECK(p.r_prime(2.0) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(p.r(2.0) == doctest::Approx(4.0).epsilon(1e-15));  // 2*8/4
    CHECK(p.r_inverse(4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p.r(-2.0) == doctest::Approx(-4.0).epsilon(1e-15));
    // alpha = 1 coincides with the classical profile
    Profile q = make_profile(ProfileFamily::power, {{"alpha", 1.0}});
    CHECK(q.r(3.0) == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("log_power profile evaluators") {
    Profile p = make_profile(ProfileFamily::log_power, {{"p", 2.0}});
    // analytic value r(1) = log 2
    CHECK(p.r(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(p.r(-1.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    // r'(1) = 2 log 2 + 1/2
    CHECK(p.r_prime(1.0) == doctest::Approx(2.0 * std::log(2.0) + 0.5).epsilon(1e-15));
    CHECK(p.r_prime(-1.0) == p.r_prime(1.0));
    // bisection inverse round-trips
    for (double u : {1e-5, 0.3, 1.0, 7.5, 4000.0}) {
        CHECK(p.r_inverse(p.r(u)) == doctest::Approx(u).epsilon(1e-12));
        CHECK(p.r_inverse(p.r(-u)) == doctest::Approx(-u).epsilon(1e-12));
    }
    CHECK(p.r_inverse(0.0) == 0.0);
}

TEST_CASE("make_profile parameter validation") {
    CHECK_THROWS_AS(make_profile(ProfileFamily::power), std::invalid_argument);
    CHECK_THROWS_AS(make_profile(ProfileFamily::power, {{"alpha", 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_profile(ProfileFamily::power, {{"alpha", -2.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_profile(ProfileFamily::log_power, {{"p", 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_profile(ProfileFamily::custom), std::invalid_argument);
}

TEST_CASE("parse_profile shorthands") {
    CHECK(parse_profile("classical").family == ProfileFamily::classical);
    Profile p = parse_profile("power:3");
    CHECK(p.family == ProfileFamily::power);
    CHECK(p.params.at("alpha") == 3.0);
    Profile q = parse_profile("log:2");
    CHECK(q.family == ProfileFamily::log_power);
    CHECK(q.params.at("p") == 2.0);
    CHECK(parse_profile("log_power:1.5").params.at("p") == 1.5);
    CHECK_THROWS_AS(parse_profile("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(parse_profile("power:x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_profile("classical:1"), std::invalid_argument);
}

TEST_CASE("estimate_beta on built-in profiles") {
    Profile cl = make_profile(ProfileFamily::classical);
    auto b = estimate_beta(cl, {1e-3, 1e3}, 400);
    CHECK(b.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(!b.diverging);
    CHECK(cl.beta_hat.has_value());
    CHECK(*cl.beta_hat == b.value);

    Profile pw = make_profile(ProfileFamily::power, {{"alpha", 3.0}});
    auto bp = estimate_beta(pw);
    CHECK(bp.value == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(!bp.diverging);

    // log_power p: sup of u r'(u)/r(u) = p + 1, approached as u -> 0
    Profile lg = make_profile(ProfileFamily::log_power, {{"p", 2.0}});
    auto bl = estimate_beta(lg);
    CHECK(bl.value == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(!bl.diverging);
}

TEST_CASE("estimate_beta flags divergence for the exponential profile") {
    Profile bad = testsupport::exp_profile();
    auto b = estimate_beta(bad, {1.0, 20.0}, 600);
    // u e^u / (e^u - 1) ~ u at the range end: still growing
    CHECK(b.value > 19.9);
    CHECK(b.diverging);
}

TEST_CASE("estimate_doubling on built-in and degenerate profiles") {
    Profile cl = make_profile(ProfileFamily::classical);
    auto m = estimate_doubling(cl);
    CHECK(m.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(!m.diverging);

    Profile pw = make_profile(ProfileFamily::power, {{"alpha", 3.0}});
    CHECK(estimate_doubling(pw).value == doctest::Approx(8.0).epsilon(1e-9));

    // log_power p = 2: ratio -> 2^p = 4 as u -> 0, decreasing outward
    Profile lg = make_profile(ProfileFamily::log_power, {{"p", 2.0}});
    auto ml = estimate_doubling(lg);
    CHECK(ml.value == doctest::Approx(4.0).epsilon(1e-4));
    CHECK(!ml.diverging);

    Profile lin = testsupport::linear_profile();
    CHECK(estimate_doubling(lin).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validate_profile accepts the built-in families") {
    for (auto fam : {ProfileFamily::classical, ProfileFamily::power,
                     ProfileFamily::log_power}) {
        std::map<std::string, double> params;
        if (fam == ProfileFamily::power) params = {{"alpha", 3.0}};
        if (fam == ProfileFamily::log_power) params = {{"p", 2.0}};
        Profile p = make_profile(fam, params);
        auto rep = validate_profile(p);
        INFO(rep.profile_name);
        CHECK(rep.admissible);
        for (const auto& c : rep.checks) {
            INFO(c.name, " worst ", c.worst_value, " at ", c.worst_at);
            CHECK((c.passed || c.warning));
        }
        CHECK(rep.beta_certified > rep.beta_hat);
        CHECK(rep.m_certified > rep.m_hat);
    }
}

TEST_CASE("validate_profile rejects the exponential profile") {
    Profile bad = testsupport::exp_profile();
    auto rep = validate_profile(bad, {1.0, 20.0}, 600);
    CHECK(!rep.admissible);
    CHECK(rep.beta_diverging);
    bool beta_check_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "beta finite over range" && !c.passed) beta_check_failed = true;
    CHECK(beta_check_failed);
}

TEST_CASE("validate_profile admits the linear boundary profile with warnings") {
    Profile lin = testsupport::linear_profile();
    auto rep = validate_profile(lin, {1e-3, 1e3}, 300);
    CHECK(rep.admissible);
    CHECK(rep.beta_hat == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!rep.warnings.empty());
}

TEST_CASE("growth inequality holds on samples for admissible profiles") {
    // r(u)/u <= r'(u) <= beta r(u)/u at every sampled u != 0
    for (auto text : {"classical", "power:2.5", "log:1.5"}) {
        Profile p = parse_profile(text);
        estimate_beta(p);
        const double beta = *p.beta_hat;
        for (double u = 1e-5; u < 1e5; u *= 3.7) {
            const double slope = p.r(u) / u;
            INFO(text, " u=", u);
            CHECK(slope <= p.r_prime(u) * (1.0 + 1e-12));
            CHECK(p.r_prime(u) <= beta * slope * (1.0 + 1e-12));
        }
    }
}
