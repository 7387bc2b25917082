#include "levy_gibbs/random.hpp"

#include <cmath>
#include <numbers>

#include "levy_gibbs/errors.hpp"

namespace levy {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept {
  // FNV-1a over the label, then mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(master) ^ h);
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = mix64(seed);
  const std::uint64_t b = mix64(a ^ mix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

double uniform01(Engine& engine) noexcept {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Engine& engine) noexcept {
  const double u1 = uniform01(engine);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double log_gamma_small_shape(Engine& engine, double shape) {
  if (!(shape > 0.0 && shape < 1.0)) {
    throw ParameterError("log_gamma_small_shape: shape must lie in (0, 1)");
  }
  // Z = -shape * log(X) has density proportional to exp(-z - exp(-z/shape)),
  // dominated by a two-piece exponential envelope.
  const double lambda = 1.0 / shape - 1.0;
  const double w = shape / (std::numbers::e * (1.0 - shape));
  const double r = 1.0 / (1.0 + w);
  for (;;) {
    const double u = uniform01(engine);
    const double z = u <= r ? -std::log(u / r) : std::log(uniform01(engine)) / lambda;
    const double h = std::exp(-z - std::exp(-z / shape));
    const double envelope = z >= 0.0 ? std::exp(-z) : w * lambda * std::exp(lambda * z);
    if (h > envelope * uniform01(engine)) {
      return -z / shape;
    }
  }
}

namespace {

double marsaglia_tsang(Engine& engine, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(engine);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(engine);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double gamma_variate(Engine& engine, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw ParameterError("gamma_variate: shape and scale must be positive and finite");
  }
  if (shape >= 1.0) return scale * marsaglia_tsang(engine, shape);
  const double log_x = log_gamma_small_shape(engine, shape) + std::log(scale);
  // exp() of anything below ~-745 is 0 anyway; skip the subnormal range.
  return log_x < -708.0 ? 0.0 : std::exp(log_x);
}

std::uint64_t poisson_variate(Engine& engine, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ParameterError("poisson_variate: mean must be finite and nonnegative");
  }
  constexpr double kPiece = 30.0;
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double m = remaining > kPiece ? kPiece : remaining;
    remaining -= m;
    double p = std::exp(-m);
    double cdf = p;
    const double u = uniform01(engine);
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= m / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

}  // namespace levy
