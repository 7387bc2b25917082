#include "levy_gibbs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/estimator.hpp"

namespace levy {

std::uint64_t regime_sample_size(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be > 0");
  const double target = 0.05 * std::pow(delta, -5.0 / 3.0);
  if (!(target < 1.8e19)) throw RangeError("regime sample size overflows");
  const double nearest = std::round(target);
  if (std::abs(target - nearest) <= 1e-9 * target) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(nearest));
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(target)));
}

RegimeSpec RegimeSpec::from_index(int j) {
  if (j < 1) throw ParameterError("regime index j must be >= 1");
  const double delta = std::ldexp(1e-3, -3 * j);
  return {j, delta, regime_sample_size(delta)};
}

VarianceGammaParams study_process() { return {0.0, 3.7 * std::pow(10.0, -1.5), 2e-3}; }

std::string to_string(ComplexityCase c) {
  switch (c) {
    case ComplexityCase::fixed_k: return "fixed-K";
    case ComplexityCase::increasing_k: return "increasing-K";
    case ComplexityCase::prior_on_k: return "prior-on-K";
  }
  return "unknown";
}

ComplexityCase complexity_case_from_string(const std::string& name) {
  if (name == "fixed-K" || name == "fixed") return ComplexityCase::fixed_k;
  if (name == "increasing-K" || name == "increasing") return ComplexityCase::increasing_k;
  if (name == "prior-on-K" || name == "prior") return ComplexityCase::prior_on_k;
  throw ParameterError("unknown complexity case '" + name + "'");
}

DeltaDiagnostics delta_condition(const BasisFeatures& at_kappa, const SamplingScheme& scheme,
                                 ComplexityCase complexity, double bound) {
  const auto n = static_cast<double>(scheme.n());
  const double delta = scheme.delta();
  DeltaDiagnostics d{};
  d.complexity = complexity;
  d.bound = bound;
  d.f1_squared_n_delta3 = at_kappa.f1 * at_kappa.f1 * n * delta * delta * delta;
  d.f2_delta = at_kappa.f2 * delta;
  d.n_delta3 = n * delta * delta * delta;
  d.n_delta_5_3 = n * std::pow(delta, 5.0 / 3.0);
  d.f1_pass = d.f1_squared_n_delta3 <= bound;
  d.f2_pass = d.f2_delta <= bound;
  d.n_delta_5_3_pass = d.n_delta_5_3 <= bound;
  d.pass = d.f1_pass && d.f2_pass;
  if (complexity == ComplexityCase::prior_on_k) d.pass = d.pass && d.n_delta_5_3_pass;
  return d;
}

SeedPlan SeedPlan::derive(std::uint64_t master, int j) {
  const std::string suffix = "/j=" + std::to_string(j);
  return {derive_seed(master, "simulate" + suffix), derive_seed(master, "draws" + suffix)};
}

ExperimentReport run_regime(const RegimeSpec& spec, const ExperimentOptions& options,
                            std::uint64_t master_seed) {
  const auto started = std::chrono::steady_clock::now();
  options.process.validate();
  options.gibbs.validate();
  options.gibbs.region.validate_excludes_origin();
  options.gibbs.basis_window.validate_excludes_origin();
  if (options.num_draws < 1) throw ParameterError("num_draws must be at least 1");
  if (!(options.band_level > 0.0 && options.band_level < 1.0)) {
    throw ParameterError("band level must lie in (0, 1)");
  }
  if (spec.n > options.max_increments) {
    throw ResourceError("regime j=" + std::to_string(spec.j) + " needs " + std::to_string(spec.n) +
                        " increments, above the guard of " +
                        std::to_string(options.max_increments) +
                        "; raise max_increments or pick a smaller j");
  }
  const std::uint64_t grid_values =
      static_cast<std::uint64_t>(options.num_draws) * options.gibbs.grid_points;
  if (grid_values > options.max_grid_values) {
    throw ResourceError("num_draws * grid_points = " + std::to_string(grid_values) +
                        " exceeds the guard of " + std::to_string(options.max_grid_values) +
                        "; reduce --draws");
  }

  const double horizon = spec.horizon();
  const std::size_t k_max = options.gibbs.resolved_k_max(horizon);
  GibbsConfig gibbs = options.gibbs;
  gibbs.k_max = k_max;
  const SeedPlan seeds = SeedPlan::derive(master_seed, spec.j);
  const BasisSystem basis = BasisSystem::trigonometric(gibbs.basis_window, k_max);

  // Only in-window increments are ever evaluated, so the n values stream
  // through without being stored.
  CoefficientAccumulator total(basis);
  vg_stream(options.process, spec.scheme(), seeds.simulation)
      .for_each_chunk(
          [&](std::uint64_t, std::span<const double> values) {
            CoefficientAccumulator chunk(basis);
            chunk.add(values);
            total.merge(chunk);
          },
          options.workers);
  CoefficientVector theta_hat = total.finish(horizon);

  MarginalK pmf = marginal_k(theta_hat, horizon, gibbs);
  const PosteriorDraws draws =
      sample_posterior(theta_hat, horizon, gibbs, pmf, options.num_draws, seeds.draws);
  const CredibleBand band = credible_band(draws, options.band_level, options.band_metric);

  const TrueLevyDensity truth = true_density_vg(options.process, options.truth_exponent);
  std::vector<double> psi_true(draws.grid.size());
  for (std::size_t g = 0; g < psi_true.size(); ++g) psi_true[g] = truth(draws.grid[g]);
  const double psi_sup = *std::max_element(psi_true.begin(), psi_true.end());
  const std::vector<double> zeros(psi_true.size(), 0.0);
  const double truth_norm = grid_distance(draws.grid, psi_true, zeros, BandMetric::l2);

  const std::size_t k_mode = pmf.mode();
  const CoefficientVector projection(basis.truncated(k_mode),
                                     std::vector<double>(theta_hat.values.begin(),
                                                         theta_hat.values.begin() +
                                                             static_cast<std::ptrdiff_t>(k_mode)),
                                     CoefficientRole::empirical, horizon);

  ExperimentReport report{
      spec,
      master_seed,
      seeds,
      options,
      k_max,
      total.in_window_count(),
      std::move(theta_hat),
      std::move(pmf),
      k_mode,
      l2_error_on_window(projection, truth, gibbs.region, gibbs.grid_points),
      grid_distance(draws.grid, band.center.values, psi_true, BandMetric::l2),
      band.radius,
      options.radius_fraction * truth_norm,
      0.0,
      psi_sup,
      draws.grid,
      psi_true,
      band.center.values,
      band.lower,
      band.upper,
      validate_config(gibbs, psi_sup, options.tau),
      delta_condition(features(basis), spec.scheme(), ComplexityCase::prior_on_k),
      0.0};
  report.options.gibbs = gibbs;
  report.concentration_prob =
      concentration_probability(draws, truth, report.concentration_radius);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::size_t oracle_complexity(double horizon, double alpha) {
  if (!(horizon > 0.0) || !(alpha > 0.0)) throw ParameterError("need t_n > 0 and alpha > 0");
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::pow(horizon, 1.0 / (2.0 * alpha + 1.0)))));
}

NoOverfitRow no_overfit_row(int j, double horizon, const MarginalK& k_posterior, double tau,
                            double alpha) {
  if (!(tau > 1.0)) throw ParameterError("tau must exceed 1");
  const std::size_t oracle = oracle_complexity(horizon, alpha);
  const double threshold = tau * static_cast<double>(oracle);
  return {j, horizon, oracle, threshold, k_posterior.mass_above(threshold)};
}

std::vector<NoOverfitRow> no_overfit_diagnostic(std::span<const ExperimentReport> reports,
                                                double tau, double alpha) {
  std::vector<NoOverfitRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) {
    rows.push_back(no_overfit_row(r.regime.j, r.regime.horizon(), r.k_posterior, tau, alpha));
  }
  return rows;
}

double rate_epsilon(double horizon, double alpha) {
  if (!(horizon > 1.0) || !(alpha > 0.0)) throw ParameterError("rate needs t_n > 1 and alpha > 0");
  return std::sqrt(std::log(horizon)) * std::pow(horizon, -alpha / (2.0 * alpha + 1.0));
}

std::vector<RateRow> rate_table(std::span<const RateInput> rows, double alpha) {
  if (rows.size() < 2) throw ParameterError("rate table needs at least two regimes");
  std::vector<RateRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const double eps = rate_epsilon(r.horizon, alpha);
    out.push_back({r.j, r.horizon, r.error, eps, r.error / eps});
  }
  return out;
}

std::vector<RateRow> rate_table(std::span<const ExperimentReport> reports, double alpha) {
  std::vector<RateInput> inputs;
  inputs.reserve(reports.size());
  for (const auto& r : reports) inputs.push_back({r.regime.j, r.regime.horizon(), r.err_posterior_mean});
  return rate_table(inputs, alpha);
}

}  // namespace levy
