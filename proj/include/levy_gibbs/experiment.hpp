#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levy_gibbs/basis.hpp"
#include "levy_gibbs/gibbs_posterior.hpp"
#include "levy_gibbs/process_sim.hpp"

namespace levy {

// High-frequency regime j: delta = 1e-3 * 2^(-3j), n = ceil(0.05 delta^(-5/3)).
struct RegimeSpec {
  int j;
  double delta;
  std::uint64_t n;

  double horizon() const noexcept { return static_cast<double>(n) * delta; }
  SamplingScheme scheme() const { return SamplingScheme(delta, n); }

  // Throws ParameterError for j < 1.
  static RegimeSpec from_index(int j);
};

// ceil(0.05 * delta^(-5/3)). A product that lands within 1e-9 relative of an
// integer is taken to be that integer, so pow() rounding cannot push an exact
// dyadic case up by one.
std::uint64_t regime_sample_size(double delta);

// The variance-gamma process used throughout the study:
// (mu, sigma, nu) = (0, 3.7e-1.5, 2e-3).
VarianceGammaParams study_process();

enum class ComplexityCase { fixed_k, increasing_k, prior_on_k };

std::string to_string(ComplexityCase c);
ComplexityCase complexity_case_from_string(const std::string& name);

struct DeltaDiagnostics {
  ComplexityCase complexity;
  double bound;
  double f1_squared_n_delta3;  // F1(kappa)^2 n delta^3
  double f2_delta;             // F2(kappa) delta
  double n_delta3;             // n delta^3, all that matters for fixed K
  double n_delta_5_3;          // n delta^(5/3), the trig prior-on-K requirement
  bool f1_pass;
  bool f2_pass;
  bool n_delta_5_3_pass;       // only meaningful for prior_on_k
  bool pass;                   // all checks relevant to `complexity`
};

// `at_kappa` are the basis features at the largest K under consideration.
// Diagnostics only; never throws for valid inputs.
DeltaDiagnostics delta_condition(const BasisFeatures& at_kappa, const SamplingScheme& scheme,
                                 ComplexityCase complexity, double bound = 1.0);

struct ExperimentOptions {
  VarianceGammaParams process = study_process();
  // The simulator samples the minus-sign density, so errors are measured
  // against it unless overridden.
  VgExponent truth_exponent = VgExponent::minus;
  GibbsConfig gibbs;
  std::size_t num_draws = 1000;
  double band_level = 0.9;
  BandMetric band_metric = BandMetric::sup;
  // Concentration radius as a fraction of ||psi_star||_L2(D).
  double radius_fraction = 0.5;
  double tau = 2.0;
  // Resource guards.
  std::uint64_t max_increments = std::uint64_t{1} << 31;
  std::uint64_t max_grid_values = std::uint64_t{1} << 27;
  unsigned workers = 0;
};

// Seeds fanned out from the master seed by fixed labels.
struct SeedPlan {
  std::uint64_t simulation;
  std::uint64_t draws;

  static SeedPlan derive(std::uint64_t master, int j);
};

struct ExperimentReport {
  RegimeSpec regime;
  std::uint64_t seed;
  SeedPlan seeds;
  ExperimentOptions options;
  std::size_t k_max;
  std::uint64_t in_window_count;
  CoefficientVector theta_hat;  // empirical coefficients up to k_max
  MarginalK k_posterior;
  std::size_t k_mode;
  double err_projection;        // projection estimator at K = k_mode
  double err_posterior_mean;
  double band_radius;
  double concentration_radius;
  double concentration_prob;
  double psi_sup;               // sup of the true density over the D grid
  std::vector<double> grid;
  std::vector<double> psi_true;
  std::vector<double> psi_mean;
  std::vector<double> band_lower;
  std::vector<double> band_upper;
  ConfigDiagnostics config_check;
  DeltaDiagnostics delta_check;
  double runtime_seconds;
};

// Simulates the regime (streamed), computes theta_hat up to k_max = ceil(t_n),
// fits the Gibbs posterior, draws `num_draws` samples and measures errors on D.
// Throws ResourceError when n or the draw grid exceeds the guards.
ExperimentReport run_regime(const RegimeSpec& spec, const ExperimentOptions& options,
                            std::uint64_t master_seed);

struct NoOverfitRow {
  int j;
  double horizon;
  std::size_t oracle_k;  // K_n = ceil(t_n^(1/(2 alpha + 1)))
  double threshold;      // tau * K_n
  double mass;           // posterior mass on {K > tau K_n}
};

std::size_t oracle_complexity(double horizon, double alpha);
NoOverfitRow no_overfit_row(int j, double horizon, const MarginalK& k_posterior, double tau,
                            double alpha);
std::vector<NoOverfitRow> no_overfit_diagnostic(std::span<const ExperimentReport> reports,
                                                double tau, double alpha);

struct RateRow {
  int j;
  double horizon;
  double error;
  double eps;    // (log t_n)^(1/2) t_n^(-alpha/(2 alpha + 1))
  double ratio;  // error / eps
};

struct RateInput {
  int j;
  double horizon;
  double error;
};

double rate_epsilon(double horizon, double alpha);
// Needs at least two rows; alpha > 0.
std::vector<RateRow> rate_table(std::span<const RateInput> rows, double alpha);
std::vector<RateRow> rate_table(std::span<const ExperimentReport> reports, double alpha);

}  // namespace levy
