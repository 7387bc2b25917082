#include "levy_gibbs/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/summation.hpp"

namespace levy {

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  CompensatedSum sum;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum.add(weights[i] * f(nodes[i]));
  return sum.value();
}

QuadratureRule gauss_legendre(std::size_t n, double lo, double hi) {
  if (n == 0) throw ParameterError("gauss_legendre: need at least one node");
  if (!(lo < hi)) throw ParameterError("gauss_legendre: require lo < hi");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const std::size_t roots = (n + 1) / 2;
  for (std::size_t i = 0; i < roots; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const auto jd = static_cast<double>(j);
        p1 = ((2.0 * jd + 1.0) * z * p2 - jd * p3) / (jd + 1.0);
      }
      derivative = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / derivative;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = 2.0 * half / ((1.0 - z * z) * derivative * derivative);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breaks, std::size_t total_nodes,
                                        std::size_t order) {
  if (breaks.size() < 2) throw ParameterError("composite quadrature: need >= 2 breakpoints");
  if (order == 0) throw ParameterError("composite quadrature: order must be positive");
  const std::size_t intervals = breaks.size() - 1;
  const std::size_t panels_total = (total_nodes + order - 1) / order;
  const std::size_t per_interval = std::max<std::size_t>(1, (panels_total + intervals - 1) / intervals);

  const QuadratureRule reference = gauss_legendre(order);
  QuadratureRule rule;
  rule.nodes.reserve(intervals * per_interval * order);
  rule.weights.reserve(intervals * per_interval * order);
  for (std::size_t i = 0; i < intervals; ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (!(lo < hi)) throw ParameterError("composite quadrature: breakpoints must increase");
    const double width = (hi - lo) / static_cast<double>(per_interval);
    for (std::size_t p = 0; p < per_interval; ++p) {
      const double a = lo + width * static_cast<double>(p);
      const double half = 0.5 * width;
      const double mid = a + half;
      for (std::size_t q = 0; q < order; ++q) {
        rule.nodes.push_back(mid + half * reference.nodes[q]);
        rule.weights.push_back(half * reference.weights[q]);
      }
    }
  }
  return rule;
}

}  // namespace levy
