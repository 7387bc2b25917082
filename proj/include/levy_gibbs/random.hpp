#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace levy {

// All sampling goes through a 64-bit Mersenne Twister. Its output sequence is
// fixed by the standard, and the variate transforms below are implemented here
// rather than through <random> distributions (whose algorithms are
// implementation-defined), so a seed reproduces the same numbers everywhere.
using Engine = std::mt19937_64;

// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives an independent seed from a master seed and a text label
// ("simulate/j=2", "draws", ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

// Engine for substream `stream` of `seed`. Distinct (seed, stream) pairs give
// unrelated sequences; used to generate chunks and draw blocks independently.
Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

// Uniform on the open interval (0, 1) with 53 random bits.
double uniform01(Engine& engine) noexcept;

// Standard normal via Box-Muller; consumes exactly two uniforms.
double standard_normal(Engine& engine) noexcept;

// Natural log of a Gamma(shape, 1) variate for 0 < shape < 1, exact rejection
// sampler that stays efficient as shape -> 0 (Liu, Martin & Syring, 2017).
// Working on the log scale avoids underflow: for shape ~ 1e-3 about half of
// all gamma variates are below the smallest positive double.
double log_gamma_small_shape(Engine& engine, double shape);

// Gamma(shape, scale) variate with density proportional to
// x^(shape-1) exp(-x/scale). Marsaglia-Tsang for shape >= 1, the log-scale
// sampler above for shape < 1.
double gamma_variate(Engine& engine, double shape, double scale);

// Poisson(mean) count by sequential inversion; large means are split into
// sums of independent Poisson(<= 30) pieces.
std::uint64_t poisson_variate(Engine& engine, double mean);

}  // namespace levy
