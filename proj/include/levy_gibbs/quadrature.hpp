#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levy {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  // Compensated sum of w_i f(x_i).
  double integrate(const std::function<double(double)>& f) const;
};

// n-point Gauss-Legendre rule on [lo, hi]; exact for polynomials of degree
// 2n - 1. Nodes by Newton iteration on the three-term recurrence.
QuadratureRule gauss_legendre(std::size_t n, double lo = -1.0, double hi = 1.0);

// Composite Gauss-Legendre: each interval [breaks[i], breaks[i+1]] is split
// into equal panels carrying an `order`-point rule, with about
// `total_nodes` nodes overall (at least one panel per interval).
QuadratureRule composite_gauss_legendre(std::span<const double> breaks, std::size_t total_nodes,
                                        std::size_t order = 16);

}  // namespace levy
