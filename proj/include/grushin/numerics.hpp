#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace grushin::num {

/// n log-spaced samples over [lo, hi], endpoints included.  Requires
/// 0 < lo <= hi and n >= 2.
std::vector<double> logspace(double lo, double hi, int n);

/// n uniformly spaced samples over [lo, hi], endpoints included (n >= 2).
std::vector<double> linspace(double lo, double hi, int n);

/// 8-point Gauss-Legendre quadrature of f over [a, b].
double gauss8(const std::function<double(double)>& f, double a, double b);

struct MinResult {
    double x = 0.0;
    double fx = 0.0;
};

/// Golden-section minimization of f on [a, b].  f need not be unimodal;
/// the best sample ever seen is returned, so the result never exceeds
/// min(f(a), f(b)).
MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     int iters = 64);

/// Evaluate f on an explicit candidate list, then golden-refine inside the
/// bracket formed by the best candidate's neighbors.  Candidates are sorted
/// internally; at least one candidate is required.
MinResult scan_golden_min(const std::function<double(double)>& f,
                          std::vector<double> candidates, int golden_iters = 64);

/// SplitMix64 stream: tiny, fast, and fully deterministic across platforms.
/// Used for all Monte-Carlo sampling so that results are reproducible and
/// independent of thread partitioning (one stream per sample index).
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Derive the substream seed for sample `index` of a run seeded by `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return s.next();
}

} // namespace grushin::num
