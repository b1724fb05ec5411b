#ifndef LSP_STATS_HPP
#define LSP_STATS_HPP

#include <cstdint>
#include <random>

namespace lsp {

// Complementary error function, evaluated without <cmath>'s erfc so the
// numeric route is documented and testable against it:
//   x < 2:  erfc = 1 - erf with the all-positive-term series
//           erf(x) = 2x e^{-x^2}/sqrt(pi) * sum_n (2x^2)^n / (2n+1)!!
//   x >= 2: Legendre continued fraction
//           erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// Absolute error is well under 1e-12 over [0, inf).
double complementary_error_function(double x);

// Survival function of the chi-square distribution with one degree of
// freedom: p = erfc(sqrt(chi2 / 2)). Throws Error on negative input.
double chi2_p_value(double chi2);

// SplitMix64 mixing step, used to derive per-resample RNG streams.
std::uint64_t splitmix64(std::uint64_t x);

// Engine for resample b of a bootstrap run with the given seed. mt19937_64
// is bit-exact across platforms by the standard.
std::mt19937_64 resample_stream(std::uint64_t seed, std::uint64_t index);

// Uniform draw in [0, n) via the multiply-shift reduction. Unlike
// std::uniform_int_distribution this is identical on every implementation.
std::size_t bounded_draw(std::mt19937_64& rng, std::size_t n);

}  // namespace lsp

#endif
