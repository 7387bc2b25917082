#include "levy_gibbs/estimator.hpp"

#include <cmath>

#include "levy_gibbs/errors.hpp"

namespace levy {

CoefficientAccumulator::CoefficientAccumulator(BasisSystem basis)
    : basis_(basis), sums_(basis.size()), scratch_(basis.size()) {}

void CoefficientAccumulator::add(double y) {
  if (!basis_.window().contains(y)) return;
  ++in_window_;
  basis_.eval_all(y, scratch_);
  for (std::size_t k = 0; k < scratch_.size(); ++k) sums_[k].add(scratch_[k]);
}

void CoefficientAccumulator::add(std::span<const double> ys) {
  for (double y : ys) add(y);
}

void CoefficientAccumulator::merge(const CoefficientAccumulator& other) {
  if (!(other.basis_ == basis_)) throw DimensionError("cannot merge accumulators of different bases");
  for (std::size_t k = 0; k < sums_.size(); ++k) sums_[k].merge(other.sums_[k]);
  in_window_ += other.in_window_;
}

CoefficientVector CoefficientAccumulator::finish(double horizon) const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ParameterError("empirical coefficients need a positive horizon t_n");
  }
  std::vector<double> theta(sums_.size());
  for (std::size_t k = 0; k < sums_.size(); ++k) theta[k] = sums_[k].value() / horizon;
  return CoefficientVector(basis_, std::move(theta), CoefficientRole::empirical, horizon);
}

CoefficientVector empirical_coefficients(const IncrementStream& stream, const BasisSystem& basis,
                                         unsigned workers) {
  CoefficientAccumulator total(basis);
  stream.for_each_chunk(
      [&](std::uint64_t, std::span<const double> values) {
        CoefficientAccumulator chunk(basis);
        chunk.add(values);
        total.merge(chunk);
      },
      workers);
  return total.finish(stream.scheme().horizon());
}

CoefficientVector empirical_coefficients(const IncrementSeries& series, const BasisSystem& basis) {
  if (series.values.empty()) throw ParameterError("empirical coefficients need a nonempty series");
  return empirical_coefficients(IncrementStream::from_series(series), basis, 1);
}

double contrast(std::span<const double> theta, std::span<const double> reference) {
  if (theta.size() != reference.size()) {
    throw DimensionError("risk: coefficient vectors have different lengths");
  }
  CompensatedSum sum;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    sum.add(-2.0 * theta[k] * reference[k]);
    sum.add(theta[k] * theta[k]);
  }
  return sum.value();
}

RiskValue empirical_risk(const CoefficientVector& theta, const CoefficientVector& theta_hat) {
  return {contrast(theta.values, theta_hat.values), theta.size(), theta_hat.horizon};
}

RiskValue population_risk(const CoefficientVector& theta, const CoefficientVector& theta_perp) {
  return {contrast(theta.values, theta_perp.values), theta.size(), theta_perp.horizon};
}

std::vector<double> uniform_grid(const Window& window, std::size_t points) {
  window.validate();
  if (points < 2) throw ParameterError("a grid needs at least two points");
  std::vector<double> grid(points);
  const double step = window.width() / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = window.a + step * static_cast<double>(i);
  grid.back() = window.b;
  return grid;
}

double trapezoid_l2_norm(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size() || grid.size() < 2) {
    throw DimensionError("trapezoid: grid and values must match and have >= 2 points");
  }
  CompensatedSum sum;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = grid[i] - grid[i - 1];
    sum.add(0.5 * h * (values[i - 1] * values[i - 1] + values[i] * values[i]));
  }
  return std::sqrt(sum.value());
}

namespace {

void check_region(const BasisSystem& basis, const Window& region, std::size_t grid_points) {
  region.validate();
  if (!basis.window().contains(region)) {
    throw WindowError("error window must lie inside the basis window");
  }
  if (grid_points < kMinGridPoints) {
    throw ParameterError("L2 error grid needs at least 512 points");
  }
}

}  // namespace

double l2_error_on_window(const CoefficientVector& theta, const TrueLevyDensity& reference,
                          const Window& region, std::size_t grid_points) {
  check_region(theta.basis, region, grid_points);
  const auto grid = uniform_grid(region, grid_points);
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = synthesize(theta, grid[i]) - reference(grid[i]);
  return trapezoid_l2_norm(grid, diff);
}

double l2_error_on_window(const CoefficientVector& theta, const CoefficientVector& reference,
                          const Window& region, std::size_t grid_points) {
  check_region(theta.basis, region, grid_points);
  check_region(reference.basis, region, grid_points);
  const auto grid = uniform_grid(region, grid_points);
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff[i] = synthesize(theta, grid[i]) - synthesize(reference, grid[i]);
  }
  return trapezoid_l2_norm(grid, diff);
}

}  // namespace levy
