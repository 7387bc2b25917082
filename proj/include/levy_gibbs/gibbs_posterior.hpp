#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levy_gibbs/basis.hpp"
#include "levy_gibbs/estimator.hpp"
#include "levy_gibbs/process_sim.hpp"

namespace levy {

struct GibbsConfig {
  double omega = 1e-5;   // learning rate
  double sigma0 = 1e3;   // prior sd of each coefficient
  double beta = 0.5;     // complexity prior pi(K) ~ exp(-beta K log K)
  std::optional<std::size_t> k_max;  // prior truncation; ceil(t_n) when unset
  Window region{0.006, 0.014};       // D, where errors and bands are reported
  Window basis_window{0.005, 0.015}; // D', where the basis lives
  std::size_t grid_points = kMinGridPoints;

  // Throws ParameterError / WindowError on invalid settings.
  void validate() const;
  // k_max if set, otherwise ceil(t_n).
  std::size_t resolved_k_max(double horizon) const;
};

// Independent N(means_k, variance) for k = 1..K given K.
struct ConditionalPosterior {
  std::size_t size;
  std::vector<double> means;
  double variance;
  double shrinkage;  // (1 + (2 omega t_n)^-1 sigma0^-2)^-1, so means = shrinkage * theta_hat
};

// Conjugate update of the N(0, sigma0^2) prior under exp(-omega t_n R_n,K):
// mean theta_hat_k * shrinkage, variance (2 omega t_n + sigma0^-2)^-1.
ConditionalPosterior conditional_posterior(std::span<const double> theta_hat, double horizon,
                                           const GibbsConfig& config);
ConditionalPosterior conditional_posterior(const CoefficientVector& theta_hat, double horizon,
                                           const GibbsConfig& config);

// Posterior mass function over K = 1..k_max.
struct MarginalK {
  std::vector<double> log_weights;  // unnormalised, may contain -inf
  std::vector<double> probs;

  std::size_t k_max() const noexcept { return probs.size(); }
  double prob(std::size_t k) const { return probs.at(k - 1); }
  std::size_t mode() const;
  // Posterior mass on {K > threshold}.
  double mass_above(double threshold) const;

  // Normalises log weights with max-subtraction.
  static MarginalK from_log_weights(std::vector<double> log_weights);
  // All mass on k0; used for fixed-K inference.
  static MarginalK point_mass(std::size_t k0, std::size_t k_max);
};

// log pi_n(K) = sum_{k <= K} omega t_n theta_hat_k^2 * shrinkage
//               - (K/2) log(2 omega t_n sigma0^2 + 1) - beta K log K,
// with K log K = 0 at K = 1. Needs theta_hat of a nested basis with exactly
// k_max entries, so every K reads a prefix.
MarginalK marginal_k(const CoefficientVector& theta_hat_full, double horizon,
                     const GibbsConfig& config);
MarginalK marginal_k(std::span<const double> theta_hat_full, double horizon,
                     const GibbsConfig& config);

struct PosteriorDraw {
  std::size_t size;  // K
  std::vector<double> theta;
};

// Draws (K, theta_K) plus every draw's psi evaluated on a uniform grid over D.
struct PosteriorDraws {
  BasisSystem basis;  // full k_max basis; draw k uses its first K functions
  std::vector<PosteriorDraw> draws;
  std::vector<double> grid;
  std::vector<double> grid_values;  // row-major, one row of grid.size() per draw

  std::size_t count() const noexcept { return draws.size(); }
  std::span<const double> row(std::size_t draw) const;
};

// Draws are generated in blocks of kDrawBlock; block b uses RNG substream b
// of `seed`, so results do not depend on the worker count.
inline constexpr std::size_t kDrawBlock = 256;

// Hierarchical sampler: K by inverse CDF on the marginal pmf, then theta_K
// from the conditional posterior.
PosteriorDraws sample_posterior(const CoefficientVector& theta_hat_full, double horizon,
                                const GibbsConfig& config, std::size_t num_draws,
                                std::uint64_t seed);
// Same sampler with an explicit pmf over K (its k_max must match the basis).
PosteriorDraws sample_posterior(const CoefficientVector& theta_hat_full, double horizon,
                                const GibbsConfig& config, const MarginalK& pmf,
                                std::size_t num_draws, std::uint64_t seed);
// Fixed-K Gibbs posterior: the hierarchical sampler under a point mass on k0.
// theta_hat may be longer than k0 only for a nested basis.
PosteriorDraws sample_fixed_k(const CoefficientVector& theta_hat, double horizon,
                              const GibbsConfig& config, std::size_t k0, std::size_t num_draws,
                              std::uint64_t seed);

struct GridFunction {
  std::vector<double> grid;
  std::vector<double> values;
};

// Pointwise average of the draws' psi over the grid. StateError if empty.
GridFunction posterior_mean_function(const PosteriorDraws& draws);

enum class BandMetric { sup, l2 };

std::string to_string(BandMetric metric);
BandMetric band_metric_from_string(const std::string& name);

struct CredibleBand {
  double radius;  // empirical `level` quantile of d(psi_draw, posterior mean)
  BandMetric metric;
  GridFunction center;
  // sup: center +- radius. l2: pointwise min/max over the draws inside the ball.
  std::vector<double> lower;
  std::vector<double> upper;
};

// Distance between two grid functions under `metric` (trapezoid L2 or max).
double grid_distance(std::span<const double> grid, std::span<const double> lhs,
                     std::span<const double> rhs, BandMetric metric);

// Throws ParameterError unless 0 < level < 1; StateError when empty.
CredibleBand credible_band(const PosteriorDraws& draws, double level,
                           BandMetric metric = BandMetric::sup);

// Fraction of draws with ||psi_draw - psi_star||_L2(D) > radius.
double concentration_probability(const PosteriorDraws& draws, const TrueLevyDensity& psi_star,
                                 double radius);

struct ConfigDiagnostics {
  double c_squared;         // 2 * sup psi
  double omega_c_squared;   // omega C^2
  double beta;
  double beta_margin;       // beta - omega C^2, reported without any slack term
  bool beta_condition;      // beta > omega C^2
  double tau;
  double no_overfit_threshold;  // tau / (tau - 1) * C^2 omega
  bool no_overfit_condition;    // beta > threshold
  std::vector<std::string> notes;
};

// Checks beta against omega C^2 and tau/(tau-1) C^2 omega. Never throws;
// inputs outside their domain are reported as failed checks with a note.
ConfigDiagnostics validate_config(const GibbsConfig& config, double psi_sup, double tau = 2.0);

}  // namespace levy
