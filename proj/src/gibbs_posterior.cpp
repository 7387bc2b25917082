#include "levy_gibbs/gibbs_posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/parallel.hpp"
#include "levy_gibbs/random.hpp"
#include "levy_gibbs/summation.hpp"

namespace levy {

void GibbsConfig::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ParameterError("omega must be > 0");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ParameterError("sigma0 must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be > 0");
  if (k_max && *k_max < 1) throw ParameterError("k_max must be at least 1");
  region.validate();
  basis_window.validate();
  if (!basis_window.contains(region)) throw WindowError("D must lie inside D'");
  if (grid_points < kMinGridPoints) throw ParameterError("grid_points must be at least 512");
}

std::size_t GibbsConfig::resolved_k_max(double horizon) const {
  if (k_max) return *k_max;
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("k_max defaults to ceil(t_n), which needs t_n > 0");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon)));
}

namespace {

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("t_n must be > 0");
}

double shrinkage_factor(double horizon, const GibbsConfig& config) {
  return 1.0 / (1.0 + 1.0 / (2.0 * config.omega * horizon * config.sigma0 * config.sigma0));
}

// Below this, exp() of a log ratio lands in the subnormal range.
constexpr double kLogUnderflow = -708.0;

}  // namespace

ConditionalPosterior conditional_posterior(std::span<const double> theta_hat, double horizon,
                                           const GibbsConfig& config) {
  check_horizon(horizon);
  config.validate();
  if (theta_hat.empty()) throw DimensionError("conditional posterior needs K >= 1");
  const double shrink = shrinkage_factor(horizon, config);
  ConditionalPosterior post{theta_hat.size(), std::vector<double>(theta_hat.size()),
                            1.0 / (2.0 * config.omega * horizon + 1.0 / (config.sigma0 * config.sigma0)),
                            shrink};
  for (std::size_t k = 0; k < theta_hat.size(); ++k) post.means[k] = shrink * theta_hat[k];
  return post;
}

ConditionalPosterior conditional_posterior(const CoefficientVector& theta_hat, double horizon,
                                           const GibbsConfig& config) {
  return conditional_posterior(std::span<const double>(theta_hat.values), horizon, config);
}

std::size_t MarginalK::mode() const {
  if (probs.empty()) throw StateError("empty pmf has no mode");
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin()) + 1;
}

double MarginalK::mass_above(double threshold) const {
  CompensatedSum sum;
  for (std::size_t k = 1; k <= probs.size(); ++k) {
    if (static_cast<double>(k) > threshold) sum.add(probs[k - 1]);
  }
  return sum.value();
}

MarginalK MarginalK::from_log_weights(std::vector<double> log_weights) {
  if (log_weights.empty()) throw ParameterError("pmf over K needs k_max >= 1");
  double top = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) {
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      throw StateError("log weight is NaN or +inf");
    }
    top = std::max(top, w);
  }
  if (!std::isfinite(top)) throw StateError("every K has zero posterior weight");
  std::vector<double> probs(log_weights.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double rel = log_weights[i] - top;
    probs[i] = rel < kLogUnderflow ? 0.0 : std::exp(rel);
    total.add(probs[i]);
  }
  const double norm = total.value();
  for (double& p : probs) p /= norm;
  return {std::move(log_weights), std::move(probs)};
}

MarginalK MarginalK::point_mass(std::size_t k0, std::size_t k_max) {
  if (k0 < 1 || k0 > k_max) throw ParameterError("point-mass K must lie in 1..k_max");
  std::vector<double> log_weights(k_max, -std::numeric_limits<double>::infinity());
  log_weights[k0 - 1] = 0.0;
  return from_log_weights(std::move(log_weights));
}

MarginalK marginal_k(std::span<const double> theta_hat_full, double horizon,
                     const GibbsConfig& config) {
  check_horizon(horizon);
  config.validate();
  const std::size_t k_max = theta_hat_full.size();
  if (k_max < 1) throw ParameterError("marginal over K needs k_max >= 1");
  if (config.k_max && *config.k_max != k_max) {
    throw ParameterError("theta_hat length " + std::to_string(k_max) + " differs from k_max " +
                         std::to_string(*config.k_max));
  }
  const double scaled = config.omega * horizon;
  const double shrink = shrinkage_factor(horizon, config);
  const double half_log_prior =
      0.5 * std::log1p(2.0 * scaled * config.sigma0 * config.sigma0);

  std::vector<double> log_weights(k_max);
  CompensatedSum fit;
  for (std::size_t k = 1; k <= k_max; ++k) {
    fit.add(scaled * theta_hat_full[k - 1] * theta_hat_full[k - 1] * shrink);
    const auto kd = static_cast<double>(k);
    const double k_log_k = k == 1 ? 0.0 : kd * std::log(kd);
    log_weights[k - 1] = fit.value() - kd * half_log_prior - config.beta * k_log_k;
  }
  return MarginalK::from_log_weights(std::move(log_weights));
}

MarginalK marginal_k(const CoefficientVector& theta_hat_full, double horizon,
                     const GibbsConfig& config) {
  if (!theta_hat_full.basis.nested() && theta_hat_full.size() > 1) {
    throw ParameterError("the prior over K needs a nested basis (trigonometric family)");
  }
  return marginal_k(std::span<const double>(theta_hat_full.values), horizon, config);
}

std::span<const double> PosteriorDraws::row(std::size_t draw) const {
  return std::span<const double>(grid_values).subspan(draw * grid.size(), grid.size());
}

PosteriorDraws sample_posterior(const CoefficientVector& theta_hat_full, double horizon,
                                const GibbsConfig& config, const MarginalK& pmf,
                                std::size_t num_draws, std::uint64_t seed) {
  check_horizon(horizon);
  config.validate();
  if (num_draws < 1) throw ParameterError("num_draws must be at least 1");
  const BasisSystem& basis = theta_hat_full.basis;
  const std::size_t k_max = theta_hat_full.size();
  if (pmf.k_max() != k_max) throw DimensionError("pmf over K and theta_hat disagree on k_max");
  if (!basis.nested()) {
    for (std::size_t k = 1; k < k_max; ++k) {
      if (pmf.prob(k) > 0.0) throw ParameterError("a non-nested basis only supports K = its size");
    }
  }
  if (!basis.window().contains(config.region)) throw WindowError("D must lie inside the basis window");

  const ConditionalPosterior post = conditional_posterior(theta_hat_full, horizon, config);
  const double sd = std::sqrt(post.variance);

  std::vector<double> cdf(k_max);
  double running = 0.0;
  std::size_t last_positive = 1;
  for (std::size_t k = 0; k < k_max; ++k) {
    running += pmf.probs[k];
    cdf[k] = running;
    if (pmf.probs[k] > 0.0) last_positive = k + 1;
  }

  PosteriorDraws out{basis, std::vector<PosteriorDraw>(num_draws),
                     uniform_grid(config.region, config.grid_points), {}};
  const std::size_t points = out.grid.size();
  std::vector<double> basis_on_grid(points * k_max);
  for (std::size_t g = 0; g < points; ++g) {
    basis.eval_all(out.grid[g], std::span<double>(basis_on_grid).subspan(g * k_max, k_max));
  }
  out.grid_values.assign(num_draws * points, 0.0);

  const std::size_t blocks = (num_draws + kDrawBlock - 1) / kDrawBlock;
  parallel_for(blocks, [&](std::size_t block) {
    Engine engine = make_engine(seed, block);
    const std::size_t end = std::min(num_draws, (block + 1) * kDrawBlock);
    for (std::size_t i = block * kDrawBlock; i < end; ++i) {
      const double u = uniform01(engine) * running;
      auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      std::size_t k = static_cast<std::size_t>(it - cdf.begin()) + 1;
      k = std::min(k, last_positive);
      while (pmf.probs[k - 1] == 0.0 && k > 1) --k;

      PosteriorDraw& draw = out.draws[i];
      draw.size = k;
      draw.theta.resize(k);
      for (std::size_t j = 0; j < k; ++j) draw.theta[j] = post.means[j] + sd * standard_normal(engine);

      double* row = out.grid_values.data() + i * points;
      for (std::size_t g = 0; g < points; ++g) {
        const double* b = basis_on_grid.data() + g * k_max;
        double v = 0.0;
        for (std::size_t j = 0; j < k; ++j) v += draw.theta[j] * b[j];
        row[g] = v;
      }
    }
  });
  return out;
}

PosteriorDraws sample_posterior(const CoefficientVector& theta_hat_full, double horizon,
                                const GibbsConfig& config, std::size_t num_draws,
                                std::uint64_t seed) {
  const MarginalK pmf = marginal_k(theta_hat_full, horizon, config);
  return sample_posterior(theta_hat_full, horizon, config, pmf, num_draws, seed);
}

PosteriorDraws sample_fixed_k(const CoefficientVector& theta_hat, double horizon,
                              const GibbsConfig& config, std::size_t k0, std::size_t num_draws,
                              std::uint64_t seed) {
  if (k0 < 1 || k0 > theta_hat.size()) {
    throw ParameterError("fixed K must lie in 1.." + std::to_string(theta_hat.size()));
  }
  return sample_posterior(theta_hat, horizon, config, MarginalK::point_mass(k0, theta_hat.size()),
                          num_draws, seed);
}

GridFunction posterior_mean_function(const PosteriorDraws& draws) {
  if (draws.count() == 0) throw StateError("posterior mean of zero draws");
  const std::size_t points = draws.grid.size();
  std::vector<CompensatedSum> sums(points);
  for (std::size_t i = 0; i < draws.count(); ++i) {
    const auto row = draws.row(i);
    for (std::size_t g = 0; g < points; ++g) sums[g].add(row[g]);
  }
  GridFunction mean{draws.grid, std::vector<double>(points)};
  const auto n = static_cast<double>(draws.count());
  for (std::size_t g = 0; g < points; ++g) mean.values[g] = sums[g].value() / n;
  return mean;
}

std::string to_string(BandMetric metric) { return metric == BandMetric::sup ? "sup" : "l2"; }

BandMetric band_metric_from_string(const std::string& name) {
  if (name == "sup") return BandMetric::sup;
  if (name == "l2" || name == "L2") return BandMetric::l2;
  throw ParameterError("unknown band metric '" + name + "' (expected sup or l2)");
}

double grid_distance(std::span<const double> grid, std::span<const double> lhs,
                     std::span<const double> rhs, BandMetric metric) {
  if (lhs.size() != grid.size() || rhs.size() != grid.size()) {
    throw DimensionError("grid functions have different lengths");
  }
  if (metric == BandMetric::sup) {
    double worst = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) worst = std::max(worst, std::abs(lhs[g] - rhs[g]));
    return worst;
  }
  std::vector<double> diff(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) diff[g] = lhs[g] - rhs[g];
  return trapezoid_l2_norm(grid, diff);
}

CredibleBand credible_band(const PosteriorDraws& draws, double level, BandMetric metric) {
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("credible level must lie in (0, 1)");
  GridFunction center = posterior_mean_function(draws);
  const std::size_t n = draws.count();
  std::vector<double> distance(n);
  for (std::size_t i = 0; i < n; ++i) {
    distance[i] = grid_distance(draws.grid, draws.row(i), center.values, metric);
  }
  std::vector<double> sorted = distance;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  const double radius = sorted[std::clamp<std::size_t>(rank, 1, n) - 1];

  const std::size_t points = center.grid.size();
  std::vector<double> lower(points);
  std::vector<double> upper(points);
  if (metric == BandMetric::sup) {
    for (std::size_t g = 0; g < points; ++g) {
      lower[g] = center.values[g] - radius;
      upper[g] = center.values[g] + radius;
    }
  } else {
    lower = center.values;
    upper = center.values;
    for (std::size_t i = 0; i < n; ++i) {
      if (distance[i] > radius) continue;
      const auto row = draws.row(i);
      for (std::size_t g = 0; g < points; ++g) {
        lower[g] = std::min(lower[g], row[g]);
        upper[g] = std::max(upper[g], row[g]);
      }
    }
  }
  return {radius, metric, std::move(center), std::move(lower), std::move(upper)};
}

double concentration_probability(const PosteriorDraws& draws, const TrueLevyDensity& psi_star,
                                 double radius) {
  if (draws.count() == 0) throw StateError("concentration probability of zero draws");
  if (!(radius >= 0.0)) throw ParameterError("radius must be nonnegative");
  std::vector<double> truth(draws.grid.size());
  for (std::size_t g = 0; g < truth.size(); ++g) truth[g] = psi_star(draws.grid[g]);
  std::size_t outside = 0;
  for (std::size_t i = 0; i < draws.count(); ++i) {
    if (grid_distance(draws.grid, draws.row(i), truth, BandMetric::l2) > radius) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(draws.count());
}

ConfigDiagnostics validate_config(const GibbsConfig& config, double psi_sup, double tau) {
  ConfigDiagnostics d{};
  d.beta = config.beta;
  d.tau = tau;
  d.c_squared = 2.0 * psi_sup;
  d.omega_c_squared = config.omega * d.c_squared;
  d.beta_margin = config.beta - d.omega_c_squared;
  d.beta_condition = config.beta > d.omega_c_squared;
  d.no_overfit_threshold = tau > 1.0 ? tau / (tau - 1.0) * d.omega_c_squared
                                     : std::numeric_limits<double>::infinity();
  d.no_overfit_condition = config.beta > d.no_overfit_threshold;
  if (!(psi_sup > 0.0) || !std::isfinite(psi_sup)) {
    d.notes.emplace_back("sup psi estimate must be positive and finite; checks are meaningless");
    d.beta_condition = false;
    d.no_overfit_condition = false;
  }
  if (!(tau > 1.0)) d.notes.emplace_back("tau must exceed 1 for the no-overfit check");
  if (!(config.beta > 0.0)) d.notes.emplace_back("beta must be positive");
  if (!(config.omega > 0.0)) d.notes.emplace_back("omega must be positive");
  return d;
}

}  // namespace levy
