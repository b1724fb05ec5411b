#include "lsp/stats.hpp"

#include <cmath>

#include "lsp/diagnostics.hpp"

namespace lsp {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477562869480794515607726;  // 1/sqrt(pi)

// erf(x) = 2x e^{-x^2}/sqrt(pi) * sum_{n>=0} (2x^2)^n / (1*3*...*(2n+1)).
// Every term is positive, so there is no cancellation; for x < 2 the tail
// drops below 1e-18 within ~60 terms.
double erf_series(double x) {
    const double two_x2 = 2.0 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 300; ++n) {
        term *= two_x2 / (2.0 * n + 1.0);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return 2.0 * x * kInvSqrtPi * std::exp(-x * x) * sum;
}

// erfc(x) * sqrt(pi) * e^{x^2} = 1 / (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz algorithm; rapid convergence for x >= 2.
double erfc_continued_fraction(double x) {
    constexpr double tiny = 1e-300;
    double f = x;
    double c = f;
    double d = 0.0;
    for (int n = 1; n < 300; ++n) {
        const double a = n / 2.0;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        d = 1.0 / d;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) * kInvSqrtPi / f;
}

}  // namespace

double complementary_error_function(double x) {
    if (x < 0.0) return 2.0 - complementary_error_function(-x);
    if (x == 0.0) return 1.0;
    if (x < 2.0) return 1.0 - erf_series(x);
    if (x > 27.0) return 0.0;  // below the smallest positive double
    return erfc_continued_fraction(x);
}

double chi2_p_value(double chi2) {
    if (chi2 < 0.0) throw Error("chi2 must be non-negative");
    return complementary_error_function(std::sqrt(chi2 / 2.0));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::mt19937_64 resample_stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(index)));
}

std::size_t bounded_draw(std::mt19937_64& rng, std::size_t n) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(rng()) * n;
    return static_cast<std::size_t>(wide >> 64);
}

}  // namespace lsp
