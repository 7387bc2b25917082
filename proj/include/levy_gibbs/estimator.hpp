#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "levy_gibbs/basis.hpp"
#include "levy_gibbs/process_sim.hpp"
#include "levy_gibbs/summation.hpp"

namespace levy {

// Running sums sum_i f_k(Y_i), one compensated accumulator per coefficient.
// Increments outside the basis window are dropped before any basis
// evaluation; in the high-frequency regime that is nearly all of them.
class CoefficientAccumulator {
 public:
  explicit CoefficientAccumulator(BasisSystem basis);

  void add(double y);
  void add(std::span<const double> ys);
  void merge(const CoefficientAccumulator& other);

  const BasisSystem& basis() const noexcept { return basis_; }
  std::uint64_t in_window_count() const noexcept { return in_window_; }

  // theta_hat_k = sums_k / horizon. Throws ParameterError unless horizon > 0.
  CoefficientVector finish(double horizon) const;

 private:
  BasisSystem basis_;
  std::vector<CompensatedSum> sums_;
  std::vector<double> scratch_;
  std::uint64_t in_window_ = 0;
};

// theta_hat_k = t_n^-1 sum_i f_k(Y_i). Both overloads fold one accumulator
// per chunk and merge the chunks in index order, so a series and the stream
// that produced it give bit-identical results.
CoefficientVector empirical_coefficients(const IncrementSeries& series, const BasisSystem& basis);
CoefficientVector empirical_coefficients(const IncrementStream& stream, const BasisSystem& basis,
                                         unsigned workers = 0);

struct RiskValue {
  double value;
  std::size_t size;  // K
  double horizon;    // t_n of the reference coefficients (0 if not empirical)
};

// -2 <theta, reference> + |theta|^2. Throws DimensionError on a length mismatch.
double contrast(std::span<const double> theta, std::span<const double> reference);

// R_n,K(theta) with the empirical coefficients as reference.
RiskValue empirical_risk(const CoefficientVector& theta, const CoefficientVector& theta_hat);
// R_K(theta) with the projected coefficients as reference.
RiskValue population_risk(const CoefficientVector& theta, const CoefficientVector& theta_perp);

// `points` equally spaced abscissae on [D.a, D.b], both ends included.
std::vector<double> uniform_grid(const Window& window, std::size_t points);

// Trapezoid-rule L2 norm of grid values on a uniform grid.
double trapezoid_l2_norm(std::span<const double> grid, std::span<const double> values);

inline constexpr std::size_t kMinGridPoints = 512;

// ||psi_theta - reference||_L2(D) by the trapezoid rule on a uniform grid of
// `grid_points` >= 512 points. D must lie inside the basis window
// (WindowError otherwise).
double l2_error_on_window(const CoefficientVector& theta, const TrueLevyDensity& reference,
                          const Window& region, std::size_t grid_points = kMinGridPoints);
double l2_error_on_window(const CoefficientVector& theta, const CoefficientVector& reference,
                          const Window& region, std::size_t grid_points = kMinGridPoints);

}  // namespace levy
