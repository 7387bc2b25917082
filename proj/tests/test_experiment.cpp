#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/estimator.hpp"
#include "levy_gibbs/experiment.hpp"
#include "oracles.hpp"

using namespace levy;

TEST_CASE("regime arithmetic") {
  const std::uint64_t expected_n[] = {160000, 5120000, 163840000};
  const double expected_t[] = {20.0, 80.0, 320.0};
  for (int j = 1; j <= 3; ++j) {
    const auto r = RegimeSpec::from_index(j);
    CHECK(r.delta == 1e-3 / std::pow(8.0, j));
    CHECK(r.n == expected_n[j - 1]);
    CHECK(r.horizon() == doctest::Approx(expected_t[j - 1]).epsilon(1e-12));
    CHECK(r.scheme().n() == r.n);
  }
  CHECK_THROWS_AS(RegimeSpec::from_index(0), ParameterError);
  CHECK_THROWS_AS(regime_sample_size(0.0), ParameterError);
  CHECK_THROWS_AS(regime_sample_size(-1.0), ParameterError);
}

TEST_CASE("sample size is the ceiling of 0.05 delta^(-5/3)") {
  oracle::Gen gen(1);
  for (int rep = 0; rep < 2000; ++rep) {
    const double delta = std::pow(10.0, gen.uniform(-6.0, -1.0));
    const auto n = regime_sample_size(delta);
    const long double target = 0.05L * std::pow(static_cast<long double>(delta), -5.0L / 3.0L);
    REQUIRE(static_cast<long double>(n) >= target * (1 - 1e-9L));
    REQUIRE(static_cast<long double>(n) < target + 1.0L);
    // The delta-condition quantity this sizing is built for.
    REQUIRE(static_cast<double>(n) * std::pow(delta, 5.0 / 3.0) <= 0.05 * (1 + 1e-9) + std::pow(delta, 5.0 / 3.0));
  }
}

TEST_CASE("study process") {
  const auto p = study_process();
  CHECK(p.mu == 0.0);
  CHECK(p.sigma == doctest::Approx(0.117004273426).epsilon(1e-10));
  CHECK(p.nu == 2e-3);
}

TEST_CASE("complexity case names") {
  for (auto c : {ComplexityCase::fixed_k, ComplexityCase::increasing_k, ComplexityCase::prior_on_k}) {
    CHECK(complexity_case_from_string(to_string(c)) == c);
  }
  CHECK_THROWS_AS(complexity_case_from_string("sometimes-K"), ParameterError);
}

TEST_CASE("delta condition diagnostics") {
  const auto r = RegimeSpec::from_index(2);
  const auto feats = features(BasisSystem::trigonometric(Window{0.005, 0.015}, 80));
  const auto d = delta_condition(feats, r.scheme(), ComplexityCase::prior_on_k);
  CHECK(d.n_delta_5_3 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(d.n_delta3 == doctest::Approx(r.n * std::pow(r.delta, 3)));
  CHECK(d.f1_squared_n_delta3 == doctest::Approx(feats.f1 * feats.f1 * d.n_delta3));
  CHECK(d.f2_delta == doctest::Approx(feats.f2 * r.delta));
  CHECK(d.pass == (d.f1_pass && d.f2_pass && d.n_delta_5_3_pass));

  // Quadrupling n quadruples the n-dependent quantities.
  const auto d4 = delta_condition(feats, SamplingScheme(r.delta, 4 * r.n), ComplexityCase::prior_on_k);
  CHECK(d4.n_delta_5_3 == doctest::Approx(4 * d.n_delta_5_3));
  CHECK(d4.f1_squared_n_delta3 == doctest::Approx(4 * d.f1_squared_n_delta3));
  CHECK(d4.f2_delta == d.f2_delta);

  // Fixed K ignores the n delta^(5/3) requirement.
  const auto big = delta_condition(feats, SamplingScheme(r.delta, 1000 * r.n), ComplexityCase::fixed_k);
  CHECK_FALSE(big.n_delta_5_3_pass);
  CHECK(big.pass == (big.f1_pass && big.f2_pass));
  const auto tiny_bound = delta_condition(feats, r.scheme(), ComplexityCase::increasing_k, 1e-30);
  CHECK_FALSE(tiny_bound.pass);
}

TEST_CASE("seed plan") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 7ULL, 123456789ULL}) {
    for (int j = 1; j <= 4; ++j) {
      const auto s = SeedPlan::derive(master, j);
      seen.insert(s.simulation);
      seen.insert(s.draws);
      CHECK(SeedPlan::derive(master, j).simulation == s.simulation);
    }
  }
  CHECK(seen.size() == 32);
}

TEST_CASE("oracle complexity and no-overfit rows") {
  CHECK(oracle_complexity(20.0, 2.0) == 2);
  CHECK(oracle_complexity(80.0, 2.0) == 3);
  CHECK(oracle_complexity(320.0, 2.0) == 4);
  CHECK(oracle_complexity(32.0, 2.0) == 2);
  CHECK(oracle_complexity(1.0, 2.0) == 1);
  CHECK_THROWS_AS(oracle_complexity(0.0, 2.0), ParameterError);

  const auto uniform = MarginalK::from_log_weights(std::vector<double>(10, 0.0));
  const auto row = no_overfit_row(1, 20.0, uniform, 2.0, 2.0);
  CHECK(row.oracle_k == 2);
  CHECK(row.threshold == 4.0);
  CHECK(row.mass == doctest::Approx(0.6));
  CHECK(no_overfit_row(1, 20.0, MarginalK::point_mass(1, 10), 2.0, 2.0).mass == 0.0);
  CHECK_THROWS_AS(no_overfit_row(1, 20.0, uniform, 1.0, 2.0), ParameterError);
}

TEST_CASE("rate table") {
  CHECK(rate_epsilon(std::exp(1.0), 0.5) == doctest::Approx(std::exp(-0.25)));
  CHECK_THROWS_AS(rate_epsilon(1.0, 2.0), ParameterError);

  // Errors proportional to eps give equal ratios.
  std::vector<RateInput> rows;
  for (int j = 1; j <= 3; ++j) {
    const double t = 20.0 * std::pow(4.0, j - 1);
    rows.push_back({j, t, 3.5 * rate_epsilon(t, 2.0)});
  }
  const auto table = rate_table(rows, 2.0);
  REQUIRE(table.size() == 3);
  for (const auto& r : table) CHECK(r.ratio == doctest::Approx(3.5).epsilon(1e-14));

  // Scaling every error scales every ratio.
  oracle::Gen gen(2);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<RateInput> in;
    for (int j = 1; j <= 3; ++j) in.push_back({j, gen.uniform(2.0, 1000.0), gen.uniform(0.0, 100.0)});
    const double c = gen.uniform(0.1, 10.0);
    auto scaled = in;
    for (auto& r : scaled) r.error *= c;
    const auto a = rate_table(in, 2.0);
    const auto b = rate_table(scaled, 2.0);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(b[i].ratio == doctest::Approx(c * a[i].ratio).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rate_table(std::span<const RateInput>(rows.data(), 1), 2.0), ParameterError);
}

TEST_CASE("run_regime j = 1") {
  ExperimentOptions opt;
  opt.num_draws = 200;
  const auto r = RegimeSpec::from_index(1);
  const auto a = run_regime(r, opt, 7);
  const auto b = run_regime(r, opt, 7);
  CHECK(a.k_max == 20);
  CHECK(a.theta_hat.size() == 20);
  CHECK(a.theta_hat.values == b.theta_hat.values);
  CHECK(a.k_posterior.probs == b.k_posterior.probs);
  CHECK(a.psi_mean == b.psi_mean);
  CHECK(a.err_posterior_mean == b.err_posterior_mean);
  CHECK(a.in_window_count > 0);
  CHECK(a.grid.size() == opt.gibbs.grid_points);
  CHECK(a.grid.front() == opt.gibbs.region.a);
  CHECK(a.grid.back() == opt.gibbs.region.b);
  CHECK(a.k_mode == a.k_posterior.mode());
  CHECK(a.seeds.simulation == SeedPlan::derive(7, 1).simulation);

  // theta_hat agrees with the plain estimator applied to the same simulation.
  const auto series = simulate_vg(opt.process, r.scheme(), a.seeds.simulation);
  const auto direct = empirical_coefficients(series, BasisSystem::trigonometric(opt.gibbs.basis_window, 20));
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(a.theta_hat.values[k] == doctest::Approx(direct.values[k]).epsilon(1e-12).scale(1e-9));
  }
  // Projection error recomputed at the mode.
  const auto psi = true_density_vg(opt.process, VgExponent::minus);
  const CoefficientVector proj(direct.basis.truncated(a.k_mode),
                               std::vector<double>(direct.values.begin(), direct.values.begin() + a.k_mode),
                               CoefficientRole::empirical, r.horizon());
  CHECK(a.err_projection == doctest::Approx(l2_error_on_window(proj, psi, opt.gibbs.region)).epsilon(1e-9));
  for (std::size_t g = 0; g < a.grid.size(); ++g) {
    REQUIRE(a.band_lower[g] <= a.psi_mean[g]);
    REQUIRE(a.psi_mean[g] <= a.band_upper[g]);
    REQUIRE(a.psi_true[g] == psi(a.grid[g]));
  }
  CHECK(a.concentration_prob >= 0.0);
  CHECK(a.concentration_prob <= 1.0);

  const auto c = run_regime(r, opt, 8);
  CHECK(c.theta_hat.values != a.theta_hat.values);
}

TEST_CASE("run_regime resource guards and validation") {
  ExperimentOptions opt;
  opt.max_increments = 1000;
  CHECK_THROWS_AS(run_regime(RegimeSpec::from_index(1), opt, 1), ResourceError);
  opt = ExperimentOptions{};
  opt.num_draws = 1 << 20;
  CHECK_THROWS_AS(run_regime(RegimeSpec::from_index(1), opt, 1), ResourceError);
  opt = ExperimentOptions{};
  opt.band_level = 1.0;
  CHECK_THROWS_AS(run_regime(RegimeSpec::from_index(1), opt, 1), ParameterError);
  opt = ExperimentOptions{};
  opt.num_draws = 0;
  CHECK_THROWS_AS(run_regime(RegimeSpec::from_index(1), opt, 1), ParameterError);
}
