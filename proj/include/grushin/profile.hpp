#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grushin/geometry.hpp"

namespace grushin {

enum class ProfileFamily { classical, power, log_power, custom };

std::string to_string(ProfileFamily f);

/// An admissible metric profile r: an odd, strictly increasing
/// differentiable homeomorphism of the real line with even derivative.
/// The evaluators are pure functions; a Profile is a cheap value type and
/// safe to copy into closures.
///
/// beta_hat and m_hat hold sampled certificates, unset until estimated:
///   beta_hat : sup of u r'(u) / r(u)        (growth comparability)
///   m_hat    : sup of r'(2u) / r'(u)        (doubling of the derivative)
struct Profile {
    std::string name;
    ProfileFamily family = ProfileFamily::custom;
    std::map<std::string, double> params;

    std::function<double(double)> r;
    std::function<double(double)> r_prime;
    std::function<double(double)> r_inverse;

    std::optional<double> beta_hat;
    std::optional<double> m_hat;

    /// Custom profiles carry opaque evaluators and cannot round-trip
    /// through a JSON descriptor.
    bool serializable() const { return family != ProfileFamily::custom; }
};

/// Construct a built-in profile.
///   classical : r(u) = u|u|/2, so r'(u) = |u|
///   power     : needs params["alpha"] > 0; r'(u) = |u|^alpha,
///               r(u) = u|u|^alpha / (alpha + 1)
///   log_power : needs params["p"] > 1; r(u) = sign(u) |u|^p log(|u| + 1)
/// Throws std::invalid_argument for bad parameters or family == custom.
Profile make_profile(ProfileFamily family, const std::map<std::string, double>& params = {});

/// Wrap user evaluators.  If r_inverse is null, a monotone bisection
/// inverse (geometric bracket growth from [0, 1], at most 200 iterations)
/// is synthesized from r.
Profile make_custom_profile(std::string name, std::function<double(double)> r,
                            std::function<double(double)> r_prime,
                            std::function<double(double)> r_inverse = nullptr);

/// Parse a profile shorthand: "classical", "power:3", "log:2" (alias
/// "log_power:2").  Throws std::invalid_argument on anything else.
Profile parse_profile(const std::string& text);

inline constexpr Interval kDefaultCertRange{1e-6, 1e6};
inline constexpr int kDefaultCertSamples = 600;

/// Result of a sampled supremum estimate over a log-spaced grid.
struct CertEstimate {
    double value = 0.0;  ///< sampled supremum (raw, no padding)
    double at_u = 0.0;   ///< abscissa realizing it
    bool diverging = false;  ///< still growing at a range boundary, or the
                             ///< sampled quantity left double range
};

/// Sampled sup of u r'(u)/r(u); stores the value into p.beta_hat.
/// `diverging` is set when the per-log-bin suprema keep growing into the
/// boundary bin (inadmissibility evidence: no finite beta exists).
CertEstimate estimate_beta(Profile& p, Interval u_range = kDefaultCertRange,
                           int n_samples = kDefaultCertSamples);

/// Sampled sup of r'(2u)/r'(u) over u_range in (0, inf); stores m_hat.
CertEstimate estimate_doubling(Profile& p, Interval u_range = kDefaultCertRange,
                               int n_samples = kDefaultCertSamples);

struct ProfileCheck {
    std::string name;
    bool passed = true;
    bool warning = false;   ///< warnings do not affect admissibility
    double worst_value = 0.0;
    double worst_at = 0.0;
    std::string note;
};

struct ProfileReport {
    std::string profile_name;
    bool admissible = false;
    double beta_hat = 0.0;
    double m_hat = 0.0;
    /// Padded constants for downstream inequality checks (sampled suprema
    /// can only undershoot the true sup, so consumers get a safety factor).
    double beta_certified = 0.0;
    double m_certified = 0.0;
    bool beta_diverging = false;
    bool m_diverging = false;
    std::vector<ProfileCheck> checks;
    std::vector<std::string> warnings;
};

inline constexpr double kCertSafetyFactor = 1.0 + 1e-6;

/// Run the full admissibility battery on a sampled grid: oddness and
/// monotonicity of r, evenness and nonnegativity of r', the two-sided
/// growth inequality r(u)/u <= r'(u) <= beta r(u)/u, monotonicity of
/// r(u)/u, inverse round-trips, doubling, and divergence flags.
/// Failures are reported, not thrown, so callers can print diagnostics.
/// The r'-homeomorphism evidence (r'(0) = 0, strict growth of r' on
/// (0, inf)) is warning-level: surjectivity of r' cannot be certified
/// from samples and the linear boundary profile is deliberately admitted.
ProfileReport validate_profile(Profile& p, Interval u_range = kDefaultCertRange,
                               int n_samples = kDefaultCertSamples);

} // namespace grushin
