#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace levy {

class TrueLevyDensity;

// Closed interval [a, b].
struct Window {
  double a = 0.0;
  double b = 1.0;

  // Throws WindowError unless a < b (both finite).
  void validate() const;
  // Additionally requires 0 outside [a, b], as for a Levy-density window.
  void validate_excludes_origin() const;

  double width() const noexcept { return b - a; }
  bool contains(double x) const noexcept { return x >= a && x <= b; }
  bool contains(const Window& inner) const noexcept { return inner.a >= a && inner.b <= b; }
  bool operator==(const Window&) const = default;
};

enum class BasisFamily { trigonometric, piecewise_legendre };

std::string to_string(BasisFamily family);
BasisFamily basis_family_from_string(const std::string& name);

// Orthonormal family f_1..f_K on a window, vanishing outside it.
//
// Trigonometric: f_1 = (b-a)^(-1/2); for k >= 2,
//   even k: (2/(b-a))^(1/2) cos(k pi (x-a)/(b-a)),
//   odd k:  (2/(b-a))^(1/2) sin((k-1) pi (x-a)/(b-a)).
// The family is a single sequence, so the span for K is nested in K+1.
//
// Piecewise Legendre: the window is split into L equal pieces and piece l
// carries sqrt((2j+1)/h) Q_j(u) on its open interior, with h the piece width,
// u the affine map of the piece onto (-1, 1) and Q_j the Legendre polynomial
// of degree j < J. Indices run piece-major: k - 1 = (l - 1) J + j, so all J
// degrees of piece 1 come first, then piece 2, and so on.
class BasisSystem {
 public:
  static BasisSystem trigonometric(Window window, std::size_t size);
  static BasisSystem piecewise_legendre(Window window, std::size_t degrees, std::size_t pieces);

  BasisFamily family() const noexcept { return family_; }
  const Window& window() const noexcept { return window_; }
  std::size_t size() const noexcept { return size_; }
  // J and L; both zero for the trigonometric family.
  std::size_t degrees() const noexcept { return degrees_; }
  std::size_t pieces() const noexcept { return pieces_; }
  bool nested() const noexcept { return family_ == BasisFamily::trigonometric; }

  // f_k(x) for 1 <= k <= size(); exactly 0 outside the window.
  double eval(std::size_t k, double x) const;
  double derivative(std::size_t k, double x) const;
  // All size() values at x; `out` must have size() elements.
  void eval_all(double x, std::span<double> out) const;

  // Window ends plus interior piece boundaries (just {a, b} for trig).
  std::vector<double> breakpoints() const;

  // First `size` functions of a nested family.
  BasisSystem truncated(std::size_t size) const;

  bool operator==(const BasisSystem&) const = default;

 private:
  BasisSystem(BasisFamily family, Window window, std::size_t size, std::size_t degrees,
              std::size_t pieces)
      : family_(family), window_(window), size_(size), degrees_(degrees), pieces_(pieces) {}

  void check_index(std::size_t k) const;
  // Piece index in [0, L) whose open interior holds x, or L if none.
  std::size_t piece_of(double x) const noexcept;

  BasisFamily family_;
  Window window_;
  std::size_t size_;
  std::size_t degrees_;
  std::size_t pieces_;
};

enum class CoefficientRole { empirical, projected, draw };

std::string to_string(CoefficientRole role);
CoefficientRole coefficient_role_from_string(const std::string& name);

// theta_K in one of its roles. `horizon` is t_n for empirical coefficients
// and 0 otherwise.
struct CoefficientVector {
  CoefficientVector(BasisSystem basis, std::vector<double> values, CoefficientRole role,
                    double horizon = 0.0);

  std::size_t size() const noexcept { return values.size(); }

  BasisSystem basis;
  std::vector<double> values;
  CoefficientRole role;
  double horizon;
};

// Row-major dense square matrix.
struct SquareMatrix {
  explicit SquareMatrix(std::size_t n) : dim(n), data(n * n, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * dim + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
  double max_abs_deviation_from_identity() const;

  std::size_t dim;
  std::vector<double> data;
};

// <f_j, f_k> over the window by composite Gauss-Legendre with about
// `quad_nodes` nodes (panels aligned with the Legendre pieces).
// Requires quad_nodes >= 4K.
SquareMatrix gram_matrix(const BasisSystem& basis, std::size_t quad_nodes);

struct BasisFeatures {
  double f1;  // max_k { sup |f_k| + int |f_k'| }
  double f2;  // max_k { sup f_k^2 + 2 int |f_k f_k'| }
};

// Evaluated in closed form over the basis window.
BasisFeatures features(const BasisSystem& basis);

struct Projection {
  CoefficientVector coefficients;
  // Largest |difference| per coefficient between the rule with quad_nodes
  // nodes and one with half the panels.
  double error_estimate;
};

// theta_k = int f_k psi over the window. The quadrature rule depends only on
// `quad_nodes` and the breakpoints, so for the nested trig family the first K
// coefficients are bit-identical for every larger K.
// Throws IntegrationError when psi is not finite at a node.
Projection project_density(const BasisSystem& basis, const std::function<double(double)>& psi,
                           std::size_t quad_nodes);
Projection project_density(const BasisSystem& basis, const TrueLevyDensity& psi,
                           std::size_t quad_nodes);

// sum_k theta_k f_k(x); throws DimensionError on a length mismatch.
double synthesize(const BasisSystem& basis, std::span<const double> theta, double x);
double synthesize(const CoefficientVector& theta, double x);

}  // namespace levy
