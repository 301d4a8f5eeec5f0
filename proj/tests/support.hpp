#pragma once

// Shared fixtures for the test suites: degenerate / inadmissible profiles
// that exercise the validator boundaries but are not part of the library's
// built-in families.

#include <cmath>

#include "grushin/profile.hpp"

namespace testsupport {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// r(u) = sign(u)(e^|u| - 1): increasing odd homeomorphism whose growth
/// ratio u r'(u)/r(u) grows without bound, so no finite beta exists.
inline grushin::Profile exp_profile() {
    return grushin::make_custom_profile(
        "exp_minus_one",
        [](double u) { return sgn(u) * std::expm1(std::abs(u)); },
        [](double u) { return std::exp(std::abs(u)); },
        [](double x) { return sgn(x) * std::log1p(std::abs(x)); });
}

/// r(u) = u: the beta = 1 boundary case, admitted with warnings.
inline grushin::Profile linear_profile() {
    return grushin::make_custom_profile(
        "linear", [](double u) { return u; }, [](double) { return 1.0; },
        [](double x) { return x; });
}

} // namespace testsupport
