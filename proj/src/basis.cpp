#include "levy_gibbs/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/process_sim.hpp"
#include "levy_gibbs/quadrature.hpp"
#include "levy_gibbs/summation.hpp"

namespace levy {

void Window::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw WindowError("window requires finite a < b");
  }
}

void Window::validate_excludes_origin() const {
  validate();
  if (a <= 0.0 && b >= 0.0) throw WindowError("a Levy-density window must exclude the origin");
}

std::string to_string(BasisFamily family) {
  return family == BasisFamily::trigonometric ? "trigonometric" : "piecewise-legendre";
}

BasisFamily basis_family_from_string(const std::string& name) {
  if (name == "trigonometric" || name == "trig") return BasisFamily::trigonometric;
  if (name == "piecewise-legendre" || name == "legendre") return BasisFamily::piecewise_legendre;
  throw ParameterError("unknown basis family '" + name + "'");
}

std::string to_string(CoefficientRole role) {
  switch (role) {
    case CoefficientRole::empirical: return "empirical";
    case CoefficientRole::projected: return "projected";
    case CoefficientRole::draw: return "draw";
  }
  return "unknown";
}

CoefficientRole coefficient_role_from_string(const std::string& name) {
  if (name == "empirical") return CoefficientRole::empirical;
  if (name == "projected") return CoefficientRole::projected;
  if (name == "draw") return CoefficientRole::draw;
  throw ParameterError("unknown coefficient role '" + name + "'");
}

namespace {

struct LegendreValue {
  double value;
  double slope;
};

// Q_j and Q_j' on [-1, 1] by the three-term recurrence and
// Q'_{n+1} = Q'_{n-1} + (2n + 1) Q_n.
LegendreValue legendre(std::size_t degree, double u) noexcept {
  double p_prev = 1.0;
  double d_prev = 0.0;
  if (degree == 0) return {p_prev, d_prev};
  double p = u;
  double d = 1.0;
  for (std::size_t n = 1; n < degree; ++n) {
    const auto nd = static_cast<double>(n);
    const double p_next = ((2.0 * nd + 1.0) * u * p - nd * p_prev) / (nd + 1.0);
    const double d_next = d_prev + (2.0 * nd + 1.0) * p;
    p_prev = p;
    d_prev = d;
    p = p_next;
    d = d_next;
  }
  return {p, d};
}

// Total variation on [-1, 1] of a smooth g whose derivative is `slope`:
// sample a grid, add the sign changes of the slope located by bisection, and
// sum |g| differences between consecutive points (g is monotone in between).
double total_variation(const std::function<double(double)>& g,
                       const std::function<double(double)>& slope) {
  constexpr int kGrid = 4096;
  std::vector<double> points;
  points.reserve(kGrid + 64);
  double prev_x = -1.0;
  double prev_s = slope(prev_x);
  points.push_back(prev_x);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = -1.0 + 2.0 * i / kGrid;
    const double s = slope(x);
    if ((prev_s < 0.0 && s > 0.0) || (prev_s > 0.0 && s < 0.0)) {
      double lo = prev_x;
      double hi = x;
      for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double sm = slope(mid);
        if ((sm < 0.0) == (prev_s < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      points.push_back(0.5 * (lo + hi));
    }
    points.push_back(x);
    prev_x = x;
    prev_s = s;
  }
  double tv = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) tv += std::abs(g(points[i]) - g(points[i - 1]));
  return tv;
}

}  // namespace

BasisSystem BasisSystem::trigonometric(Window window, std::size_t size) {
  window.validate();
  if (size == 0) throw ParameterError("basis size K must be at least 1");
  return BasisSystem(BasisFamily::trigonometric, window, size, 0, 0);
}

BasisSystem BasisSystem::piecewise_legendre(Window window, std::size_t degrees,
                                            std::size_t pieces) {
  window.validate();
  if (degrees == 0 || pieces == 0) {
    throw ParameterError("piecewise Legendre basis needs J >= 1 and L >= 1");
  }
  return BasisSystem(BasisFamily::piecewise_legendre, window, degrees * pieces, degrees, pieces);
}

void BasisSystem::check_index(std::size_t k) const {
  if (k < 1 || k > size_) {
    throw IndexError("basis index " + std::to_string(k) + " outside 1.." + std::to_string(size_));
  }
}

std::size_t BasisSystem::piece_of(double x) const noexcept {
  const double h = window_.width() / static_cast<double>(pieces_);
  const double pos = (x - window_.a) / h;
  if (!(pos > 0.0) || !(x < window_.b)) return pieces_;
  auto l = static_cast<std::size_t>(pos);
  if (l >= pieces_) return pieces_;
  const double lo = window_.a + window_.width() * static_cast<double>(l) / static_cast<double>(pieces_);
  const double hi =
      window_.a + window_.width() * static_cast<double>(l + 1) / static_cast<double>(pieces_);
  // Knots themselves lie outside every open piece.
  if (x <= lo || x >= hi) return pieces_;
  return l;
}

double BasisSystem::eval(std::size_t k, double x) const {
  check_index(k);
  const double width = window_.width();
  if (family_ == BasisFamily::trigonometric) {
    if (!window_.contains(x)) return 0.0;
    if (k == 1) return 1.0 / std::sqrt(width);
    const double amp = std::sqrt(2.0 / width);
    const double phase = (x - window_.a) / width * std::numbers::pi;
    return k % 2 == 0 ? amp * std::cos(static_cast<double>(k) * phase)
                      : amp * std::sin(static_cast<double>(k - 1) * phase);
  }
  const std::size_t piece = (k - 1) / degrees_;
  const std::size_t degree = (k - 1) % degrees_;
  if (piece_of(x) != piece) return 0.0;
  const double h = width / static_cast<double>(pieces_);
  const double lo = window_.a + width * static_cast<double>(piece) / static_cast<double>(pieces_);
  const double hi =
      window_.a + width * static_cast<double>(piece + 1) / static_cast<double>(pieces_);
  const double u = (2.0 * x - (lo + hi)) / (hi - lo);
  return std::sqrt((2.0 * static_cast<double>(degree) + 1.0) / h) * legendre(degree, u).value;
}

double BasisSystem::derivative(std::size_t k, double x) const {
  check_index(k);
  const double width = window_.width();
  if (family_ == BasisFamily::trigonometric) {
    if (!window_.contains(x) || k == 1) return 0.0;
    const double amp = std::sqrt(2.0 / width);
    const double phase = (x - window_.a) / width * std::numbers::pi;
    const double freq = static_cast<double>(k % 2 == 0 ? k : k - 1) * std::numbers::pi / width;
    return k % 2 == 0 ? -amp * freq * std::sin(static_cast<double>(k) * phase)
                      : amp * freq * std::cos(static_cast<double>(k - 1) * phase);
  }
  const std::size_t piece = (k - 1) / degrees_;
  const std::size_t degree = (k - 1) % degrees_;
  if (piece_of(x) != piece) return 0.0;
  const double lo = window_.a + width * static_cast<double>(piece) / static_cast<double>(pieces_);
  const double hi =
      window_.a + width * static_cast<double>(piece + 1) / static_cast<double>(pieces_);
  const double h = hi - lo;
  const double u = (2.0 * x - (lo + hi)) / h;
  const double scale = std::sqrt((2.0 * static_cast<double>(degree) + 1.0) /
                                 (width / static_cast<double>(pieces_)));
  return scale * legendre(degree, u).slope * 2.0 / h;
}

void BasisSystem::eval_all(double x, std::span<double> out) const {
  if (out.size() != size_) throw DimensionError("eval_all: output span has the wrong length");
  std::fill(out.begin(), out.end(), 0.0);
  const double width = window_.width();
  if (family_ == BasisFamily::trigonometric) {
    if (!window_.contains(x)) return;
    out[0] = 1.0 / std::sqrt(width);
    const double amp = std::sqrt(2.0 / width);
    const double phase = (x - window_.a) / width * std::numbers::pi;
    for (std::size_t k = 2; k <= size_; ++k) {
      out[k - 1] = k % 2 == 0 ? amp * std::cos(static_cast<double>(k) * phase)
                              : amp * std::sin(static_cast<double>(k - 1) * phase);
    }
    return;
  }
  const std::size_t piece = piece_of(x);
  if (piece == pieces_) return;
  for (std::size_t j = 0; j < degrees_; ++j) out[piece * degrees_ + j] = eval(piece * degrees_ + j + 1, x);
}

std::vector<double> BasisSystem::breakpoints() const {
  if (family_ == BasisFamily::trigonometric) return {window_.a, window_.b};
  std::vector<double> knots(pieces_ + 1);
  for (std::size_t l = 0; l <= pieces_; ++l) {
    knots[l] = window_.a + window_.width() * static_cast<double>(l) / static_cast<double>(pieces_);
  }
  knots.back() = window_.b;
  return knots;
}

BasisSystem BasisSystem::truncated(std::size_t size) const {
  if (!nested()) throw ParameterError("only a nested basis family can be truncated");
  if (size == 0 || size > size_) throw ParameterError("truncated size must lie in 1..K");
  return trigonometric(window_, size);
}

CoefficientVector::CoefficientVector(BasisSystem basis_, std::vector<double> values_,
                                     CoefficientRole role_, double horizon_)
    : basis(basis_), values(std::move(values_)), role(role_), horizon(horizon_) {
  if (values.size() != basis.size()) {
    throw DimensionError("coefficient vector length " + std::to_string(values.size()) +
                         " differs from basis size " + std::to_string(basis.size()));
  }
}

double SquareMatrix::max_abs_deviation_from_identity() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

SquareMatrix gram_matrix(const BasisSystem& basis, std::size_t quad_nodes) {
  const std::size_t dim = basis.size();
  if (quad_nodes < 4 * dim) throw ParameterError("gram_matrix: need at least 4K quadrature nodes");
  const auto knots = basis.breakpoints();
  const QuadratureRule rule = composite_gauss_legendre(knots, quad_nodes);
  SquareMatrix gram(dim);
  std::vector<double> values(dim);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.eval_all(rule.nodes[q], values);
    const double w = rule.weights[q];
    for (std::size_t i = 0; i < dim; ++i) {
      if (values[i] == 0.0) continue;
      const double wi = w * values[i];
      for (std::size_t j = i; j < dim; ++j) gram(i, j) += wi * values[j];
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);
  }
  return gram;
}

BasisFeatures features(const BasisSystem& basis) {
  const double width = basis.window().width();
  BasisFeatures out{0.0, 0.0};
  if (basis.family() == BasisFamily::trigonometric) {
    // f_1 is constant. For k >= 2 with angular multiple m (k or k - 1),
    // sup |f| = (2/w)^(1/2), int |f'| = (2/w)^(1/2) * 2m and the total
    // variation of f^2 is (2/w) * 2m.
    out.f1 = 1.0 / std::sqrt(width);
    out.f2 = 1.0 / width;
    for (std::size_t k = 2; k <= basis.size(); ++k) {
      const auto m = static_cast<double>(k % 2 == 0 ? k : k - 1);
      out.f1 = std::max(out.f1, std::sqrt(2.0 / width) * (1.0 + 2.0 * m));
      out.f2 = std::max(out.f2, 2.0 / width * (1.0 + 2.0 * m));
    }
    return out;
  }
  // Every piece has width h; on a piece f = sqrt((2j+1)/h) Q_j(u) and the
  // derivative integrals reduce to total variations of Q_j and Q_j^2 on [-1, 1].
  const double h = width / static_cast<double>(basis.pieces());
  for (std::size_t j = 0; j < basis.degrees(); ++j) {
    const double scale = (2.0 * static_cast<double>(j) + 1.0) / h;
    const double tv_q = total_variation([j](double u) { return legendre(j, u).value; },
                                        [j](double u) { return legendre(j, u).slope; });
    const double tv_q2 = total_variation(
        [j](double u) {
          const double q = legendre(j, u).value;
          return q * q;
        },
        [j](double u) {
          const auto lv = legendre(j, u);
          return 2.0 * lv.value * lv.slope;
        });
    out.f1 = std::max(out.f1, std::sqrt(scale) * (1.0 + tv_q));
    out.f2 = std::max(out.f2, scale * (1.0 + tv_q2));
  }
  return out;
}

namespace {

std::vector<double> project_with(const BasisSystem& basis, const std::function<double(double)>& psi,
                                 const QuadratureRule& rule) {
  const std::size_t dim = basis.size();
  std::vector<CompensatedSum> sums(dim);
  std::vector<double> values(dim);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = rule.nodes[q];
    const double p = psi(x);
    if (!std::isfinite(p)) {
      throw IntegrationError("density is not finite at x = " + std::to_string(x));
    }
    basis.eval_all(x, values);
    const double wp = rule.weights[q] * p;
    for (std::size_t k = 0; k < dim; ++k) sums[k].add(wp * values[k]);
  }
  std::vector<double> theta(dim);
  for (std::size_t k = 0; k < dim; ++k) theta[k] = sums[k].value();
  return theta;
}

}  // namespace

Projection project_density(const BasisSystem& basis, const std::function<double(double)>& psi,
                           std::size_t quad_nodes) {
  if (quad_nodes < 4 * basis.size()) {
    throw ParameterError("project_density: need at least 4K quadrature nodes");
  }
  const auto knots = basis.breakpoints();
  const auto fine = project_with(basis, psi, composite_gauss_legendre(knots, quad_nodes));
  const auto coarse = project_with(basis, psi, composite_gauss_legendre(knots, quad_nodes / 2));
  double estimate = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    estimate = std::max(estimate, std::abs(fine[k] - coarse[k]));
  }
  return {CoefficientVector(basis, fine, CoefficientRole::projected), estimate};
}

Projection project_density(const BasisSystem& basis, const TrueLevyDensity& psi,
                           std::size_t quad_nodes) {
  return project_density(basis, std::function<double(double)>([&psi](double x) { return psi(x); }),
                         quad_nodes);
}

double synthesize(const BasisSystem& basis, std::span<const double> theta, double x) {
  if (theta.size() != basis.size()) {
    throw DimensionError("synthesize: coefficient length differs from basis size");
  }
  if (!basis.window().contains(x)) return 0.0;
  std::vector<double> values(basis.size());
  basis.eval_all(x, values);
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) sum += theta[k] * values[k];
  return sum;
}

double synthesize(const CoefficientVector& theta, double x) {
  return synthesize(theta.basis, theta.values, x);
}

}  // namespace levy
