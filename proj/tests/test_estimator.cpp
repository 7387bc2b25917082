#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/estimator.hpp"
#include "levy_gibbs/experiment.hpp"
#include "oracles.hpp"

using namespace levy;

namespace {

const Window kWide{0.005, 0.015};
const Window kNarrow{0.006, 0.014};

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * y[i];
  return static_cast<double>(s);
}

double dist2(const std::vector<double>& x, const std::vector<double>& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(static_cast<long double>(x[i]) - y[i], 2);
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("empirical coefficients: trivial cases") {
  const auto basis = BasisSystem::trigonometric(kWide, 4);
  SUBCASE("no data inside the window") {
    const IncrementSeries s{SamplingScheme(0.1, 3), {0.0, -0.01, 0.5}, 0};
    const auto theta = empirical_coefficients(s, basis);
    for (double v : theta.values) CHECK(v == 0.0);
    CHECK(theta.horizon == doctest::Approx(0.3));
    CHECK(theta.role == CoefficientRole::empirical);
  }
  SUBCASE("single value, K = 1") {
    const IncrementSeries s{SamplingScheme(0.5, 4), {0.0, 0.01, 1.0, -1.0}, 0};
    const auto theta = empirical_coefficients(s, BasisSystem::trigonometric(kWide, 1));
    CHECK(theta.values[0] == doctest::Approx(10.0 / 2.0).epsilon(1e-14));
  }
  CoefficientAccumulator acc(basis);
  CHECK_THROWS_AS(acc.finish(0.0), ParameterError);
}

TEST_CASE("empirical coefficients match a double-loop oracle") {
  oracle::Gen gen(1);
  std::vector<double> ys(1000);
  for (auto& y : ys) y = gen.uniform(0.0, 0.02);
  const IncrementSeries s{SamplingScheme(0.01, ys.size()), ys, 0};
  const auto theta = empirical_coefficients(s, BasisSystem::trigonometric(kWide, 8));
  for (std::size_t k = 1; k <= 8; ++k) {
    long double sum = 0;
    for (double y : ys) sum += oracle::trig(k, kWide.a, kWide.b, y);
    const double ref = static_cast<double>(sum / 10.0L);
    CHECK(theta.values[k - 1] == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("streamed and materialised coefficients agree bit for bit") {
  const auto p = study_process();
  const SamplingScheme scheme(1e-4, 250000);
  const auto basis = BasisSystem::trigonometric(kWide, 30);
  const auto series = simulate_vg(p, scheme, 17);
  const auto a = empirical_coefficients(series, basis);
  const auto b = empirical_coefficients(vg_stream(p, scheme, 17), basis, 1);
  const auto c = empirical_coefficients(vg_stream(p, scheme, 17), basis, 4);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);

  // Any other partition agrees to 1e-12 relative.
  oracle::Gen gen(2);
  for (int rep = 0; rep < 5; ++rep) {
    const auto chunk = gen.index(1, 100000);
    const auto d = empirical_coefficients(IncrementStream::from_series(series, chunk), basis);
    for (std::size_t k = 0; k < 30; ++k) {
      REQUIRE(d.values[k] == doctest::Approx(a.values[k]).epsilon(1e-12).scale(1e-12 * std::abs(a.values[0])));
    }
  }
}

TEST_CASE("pre-filtering increments to the window changes nothing") {
  const auto series = simulate_vg(study_process(), SamplingScheme(1e-4, 200000), 3);
  std::vector<double> inside;
  for (double y : series.values) {
    if (kWide.contains(y)) inside.push_back(y);
  }
  REQUIRE(!inside.empty());
  const auto basis = BasisSystem::trigonometric(kWide, 12);
  CoefficientAccumulator all(basis), filtered(basis);
  all.add(series.values);
  filtered.add(inside);
  CHECK(all.in_window_count() == inside.size());
  const double t = series.scheme.horizon();
  CHECK(all.finish(t).values == filtered.finish(t).values);
}

TEST_CASE("accumulators reject merging different bases") {
  CoefficientAccumulator a(BasisSystem::trigonometric(kWide, 3));
  CoefficientAccumulator b(BasisSystem::trigonometric(kWide, 4));
  CHECK_THROWS_AS(a.merge(b), DimensionError);
}

TEST_CASE("empirical risk") {
  const auto basis = BasisSystem::trigonometric(kWide, 5);
  const CoefficientVector hat(basis, {1.0, -2.0, 0.5, 3.0, 0.0}, CoefficientRole::empirical, 10.0);
  const CoefficientVector zero(basis, std::vector<double>(5, 0.0), CoefficientRole::draw);
  CHECK(empirical_risk(zero, hat).value == 0.0);
  CHECK(empirical_risk(hat, hat).value == doctest::Approx(-dot(hat.values, hat.values)));
  CHECK(empirical_risk(hat, hat).size == 5);
  CHECK(empirical_risk(hat, hat).horizon == 10.0);
  const CoefficientVector short_theta(BasisSystem::trigonometric(kWide, 4), {1, 2, 3, 4}, CoefficientRole::draw);
  CHECK_THROWS_AS(empirical_risk(short_theta, hat), DimensionError);
}

TEST_CASE("risk difference identity and minimiser over random pairs") {
  oracle::Gen gen(3);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto k = gen.index(1, 40);
    const auto basis = BasisSystem::trigonometric(kWide, k);
    const double scale = gen.uniform(0.01, 1000.0);
    const CoefficientVector hat(basis, gen.normals(k, scale), CoefficientRole::empirical, 1.0);
    const CoefficientVector th(basis, gen.normals(k, scale), CoefficientRole::draw);
    const CoefficientVector th2(basis, gen.normals(k, scale), CoefficientRole::draw);
    const double lhs = empirical_risk(th, hat).value - empirical_risk(th2, hat).value;
    const double rhs = dist2(th.values, hat.values) - dist2(th2.values, hat.values);
    // Relative to the magnitude of the terms being differenced.
    const double mag = dist2(th.values, hat.values) + dist2(th2.values, hat.values) + dot(hat.values, hat.values);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * mag);
    REQUIRE(empirical_risk(hat, hat).value <= empirical_risk(th, hat).value);
  }
}

TEST_CASE("population risk against a quadrature oracle") {
  const auto psi = true_density_vg(study_process(), VgExponent::minus);
  const auto basis = BasisSystem::trigonometric(kWide, 8);
  const auto perp = project_density(basis, psi, 4096).coefficients;
  CHECK(population_risk(perp, perp).value == doctest::Approx(-dot(perp.values, perp.values)));
  oracle::Gen gen(4);
  for (int rep = 0; rep < 5; ++rep) {
    const CoefficientVector th(basis, gen.normals(8, 500.0), CoefficientRole::draw);
    const double cross = oracle::simpson([&](double x) { return synthesize(th, x) * psi(x); }, kWide.a, kWide.b, 100000);
    const double sq = oracle::simpson([&](double x) { return std::pow(synthesize(th, x), 2); }, kWide.a, kWide.b, 100000);
    const double ref = -2 * cross + sq;
    CHECK(std::abs(population_risk(th, perp).value - ref) < 1e-6 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("L2 error on the reporting window") {
  const auto psi = true_density_vg(study_process(), VgExponent::minus);
  const auto basis = BasisSystem::trigonometric(kWide, 8);
  const CoefficientVector zero(basis, std::vector<double>(8, 0.0), CoefficientRole::draw);
  const auto perp = project_density(basis, psi, 4096).coefficients;
  CHECK(l2_error_on_window(perp, perp, kNarrow) == 0.0);

  // Trapezoid on 512 points vs a fine Simpson value of ||psi||_L2(D).
  const double ref = std::sqrt(oracle::simpson([&](double x) { return psi(x) * psi(x); }, kNarrow.a, kNarrow.b, 200000));
  CHECK(l2_error_on_window(zero, psi, kNarrow, 100001) == doctest::Approx(ref).epsilon(1e-6));
  CHECK(l2_error_on_window(zero, psi, kNarrow) == doctest::Approx(ref).epsilon(1e-4));

  CHECK_THROWS_AS(l2_error_on_window(zero, psi, Window{0.004, 0.014}), WindowError);
  CHECK_THROWS_AS(l2_error_on_window(zero, psi, kNarrow, 100), ParameterError);
}

TEST_CASE("uniform grid and trapezoid norm") {
  const auto grid = uniform_grid(kNarrow, 512);
  CHECK(grid.size() == 512);
  CHECK(grid.front() == kNarrow.a);
  CHECK(grid.back() == kNarrow.b);
  const std::vector<double> ones(grid.size(), 1.0);
  CHECK(trapezoid_l2_norm(grid, ones) == doctest::Approx(std::sqrt(kNarrow.width())).epsilon(1e-12));
}
