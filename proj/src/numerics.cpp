#include "grushin/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grushin::num {

std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 2)
        throw std::invalid_argument("logspace: need 0 < lo <= hi and n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: need n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

// Abscissae/weights for 8-point Gauss-Legendre on [-1, 1].
constexpr double kGaussX[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
constexpr double kGaussW[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};

} // namespace

double gauss8(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        acc += kGaussW[i] * (f(mid - half * kGaussX[i]) + f(mid + half * kGaussX[i]));
    }
    return acc * half;
}

MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     int iters) {
    if (b < a) std::swap(a, b);
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    MinResult best = (f1 <= f2) ? MinResult{x1, f1} : MinResult{x2, f2};
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        if (f1 < best.fx) best = {x1, f1};
        if (f2 < best.fx) best = {x2, f2};
    }
    return best;
}

MinResult scan_golden_min(const std::function<double(double)>& f,
                          std::vector<double> candidates, int golden_iters) {
    if (candidates.empty())
        throw std::invalid_argument("scan_golden_min: empty candidate list");
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t best_i = 0;
    double best_f = f(candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double fi = f(candidates[i]);
        if (fi < best_f) {
            best_f = fi;
            best_i = i;
        }
    }
    double lo = candidates[best_i > 0 ? best_i - 1 : 0];
    double hi = candidates[std::min(best_i + 1, candidates.size() - 1)];
    if (lo == hi) return {candidates[best_i], best_f};
    MinResult refined = golden_min(f, lo, hi, golden_iters);
    if (refined.fx < best_f) return refined;
    return {candidates[best_i], best_f};
}

} // namespace grushin::num
