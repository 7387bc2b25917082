#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "levy_gibbs/random.hpp"

namespace levy {

// Equally spaced observation times t_i = i * delta, i = 0..n.
class SamplingScheme {
 public:
  // Throws ParameterError for delta <= 0 or n == 0, RangeError when n * delta
  // is not a finite double.
  SamplingScheme(double delta, std::uint64_t n);

  double delta() const noexcept { return delta_; }
  std::uint64_t n() const noexcept { return n_; }
  // Horizon t_n = n * delta.
  double horizon() const noexcept { return static_cast<double>(n_) * delta_; }

 private:
  double delta_;
  std::uint64_t n_;
};

struct VarianceGammaParams {
  double mu = 0.0;     // drift of the subordinated Brownian motion
  double sigma = 0.0;  // its volatility
  double nu = 1.0;     // variance rate of the gamma subordinator

  void validate() const;
};

// Jump size law G of a compound Poisson process.
struct PointMassJump {
  double at = 1.0;
};
struct NormalJump {
  double mean = 0.0;
  double sd = 1.0;
};

class JumpDistribution {
 public:
  JumpDistribution(PointMassJump p) : law_(p) {}  // NOLINT(google-explicit-constructor)
  JumpDistribution(NormalJump n);                  // NOLINT(google-explicit-constructor)

  double sample(Engine& engine) const;
  double mean() const noexcept;
  double second_moment() const noexcept;
  bool is_point_mass() const noexcept { return std::holds_alternative<PointMassJump>(law_); }
  // Density of G; throws DomainError for a point mass.
  double density(double x) const;
  // "point:<c>" or "normal:<mean>,<sd>", the form accepted by parse().
  std::string describe() const;
  static JumpDistribution parse(const std::string& text);

 private:
  std::variant<PointMassJump, NormalJump> law_;
};

struct CompoundPoissonParams {
  double lambda = 1.0;
  JumpDistribution jump = PointMassJump{1.0};

  void validate() const;
};

// Observed increments Y_i = X(t_i) - X(t_{i-1}), fully materialised.
struct IncrementSeries {
  SamplingScheme scheme;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

// Increments produced chunk by chunk without materialising all n values.
// Chunk c covers indices [c * chunk_size, min(n, (c + 1) * chunk_size)) and
// is generated from its own RNG substream, so the values depend only on the
// seed and the chunk size, never on the thread count or visiting order.
class IncrementStream {
 public:
  using ChunkGenerator =
      std::function<void(std::uint64_t chunk_index, std::span<double> out)>;
  using ChunkVisitor =
      std::function<void(std::uint64_t chunk_index, std::span<const double> values)>;

  static constexpr std::size_t kDefaultChunkSize = std::size_t{1} << 16;

  IncrementStream(SamplingScheme scheme, std::uint64_t seed, ChunkGenerator generator,
                  std::size_t chunk_size = kDefaultChunkSize);

  // Wraps an already materialised series, which must outlive the stream.
  static IncrementStream from_series(const IncrementSeries& series,
                                     std::size_t chunk_size = kDefaultChunkSize);

  const SamplingScheme& scheme() const noexcept { return scheme_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t chunk_size() const noexcept { return chunk_size_; }
  std::uint64_t chunk_count() const noexcept;

  // Generates chunks in parallel batches and calls `visit` serially in
  // increasing chunk order.
  void for_each_chunk(const ChunkVisitor& visit, unsigned workers = 0) const;

  IncrementSeries materialize(unsigned workers = 0) const;

 private:
  SamplingScheme scheme_;
  std::uint64_t seed_;
  ChunkGenerator generator_;
  std::size_t chunk_size_;
};

IncrementStream vg_stream(const VarianceGammaParams& params, const SamplingScheme& scheme,
                          std::uint64_t seed);
IncrementStream compound_poisson_stream(const CompoundPoissonParams& params,
                                        const SamplingScheme& scheme, std::uint64_t seed);

// U_i ~ Gamma(delta / nu, nu), Y_i | U_i ~ N(mu * U_i, sigma^2 * U_i).
IncrementSeries simulate_vg(const VarianceGammaParams& params, const SamplingScheme& scheme,
                            std::uint64_t seed);
// Each increment sums Poisson(lambda * delta) iid jumps drawn from G.
IncrementSeries simulate_compound_poisson(const CompoundPoissonParams& params,
                                          const SamplingScheme& scheme, std::uint64_t seed);

// Sign of the exponent on the positive branch of the variance-gamma density.
// `plus` is exp(+x / eta+), which grows in x; `minus` is exp(-x / eta+), the
// Levy density of the process simulate_vg samples. The negative branch,
// exp(x / eta-), is the same under both.
enum class VgExponent { plus, minus };

class TrueLevyDensity {
 public:
  enum class Family { variance_gamma, compound_poisson, custom };

  TrueLevyDensity(Family family, std::string description, std::function<double(double)> eval);

  Family family() const noexcept { return family_; }
  const std::string& description() const noexcept { return description_; }

  // Density at x != 0. Throws DomainError at the origin or for non-finite x.
  double operator()(double x) const;

 private:
  Family family_;
  std::string description_;
  std::function<double(double)> eval_;
};

struct VgScales {
  double eta_plus;
  double eta_minus;
};
// eta+- = (mu^2 nu^2 / 4 + sigma^2 nu / 2)^(1/2) +- mu nu / 2.
VgScales vg_scales(const VarianceGammaParams& params) noexcept;

// psi(x) = |x|^-1 exp(x / eta-) / nu for x < 0 and |x|^-1 exp(+-x / eta+) / nu
// for x > 0 (sign per `exponent`). Requires nu > 0 and (mu, sigma) != (0, 0).
TrueLevyDensity true_density_vg(const VarianceGammaParams& params,
                                VgExponent exponent = VgExponent::plus);

// lambda times the density of a continuous jump law.
TrueLevyDensity true_density_compound_poisson(const CompoundPoissonParams& params);

}  // namespace levy
