#pragma once

#include <functional>
#include <span>
#include <vector>

#include "biharm/banded.hpp"
#include "biharm/coeffs.hpp"

namespace biharm {

inline constexpr int kMinElements = 8;
inline constexpr int kElementQuadraturePoints = 4;

// Hermite-cubic (C1) discretization of the clamped operator
//   u -> (sigma u'')'' - (q u')'
// on a uniform mesh. Unknowns are (value, slope) at the interior nodes
// 1 .. E-1, interleaved; the clamped values at x = 0 and x = length are
// eliminated, so every vector in this space satisfies
// u(0) = u'(0) = u(l) = u'(l) = 0 exactly.
//
// A "full" nodal vector carries all 2(E+1) Hermite dofs and is used for
// interpolating arbitrary functions (boundary values included).
class DiscreteOperator {
 public:
  int elements() const noexcept { return elements_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return h_; }
  std::size_t dofs() const noexcept { return 2 * static_cast<std::size_t>(elements_ - 1); }
  std::size_t full_dofs() const noexcept { return 2 * static_cast<std::size_t>(elements_ + 1); }

  const BandedSymmetric& stiffness() const noexcept { return stiffness_; }
  const BandedSymmetric& mass() const noexcept { return mass_; }
  const CoefficientProfile& profile() const noexcept { return profile_; }

  // Coefficients of the functional u -> u''(length) on the constrained space.
  const std::vector<double>& trace_vector() const noexcept { return trace_; }

  // Sum of w * (sigma u'' v'' + q u' v') over the element quadrature, and
  // the analogous rho-weighted mass form, evaluated from the
  // reconstruction pointwise rather than through the assembled matrices.
  double stiffness_form(std::span<const double> u, std::span<const double> v) const;
  double mass_form(std::span<const double> u, std::span<const double> v) const;

  // Derivative of order 0..3 of the reconstruction at x (constrained vector).
  double evaluate(std::span<const double> u, double x, int derivative = 0) const;
  double evaluate_full(std::span<const double> full, double x, int derivative = 0) const;

  std::vector<double> expand(std::span<const double> u) const;    // constrained -> full
  std::vector<double> restrict_to_interior(std::span<const double> full) const;

  // Hermite interpolant: nodal values f(x_i) and slopes df(x_i).
  std::vector<double> interpolate(const std::function<double(double)>& f,
                                  const std::function<double(double)>& df) const;

  // Element quadrature used by assembly (x, w) and the coefficient values there.
  struct QuadraturePoint {
    double x;
    double w;
    double rho;
    double sigma;
    double q;
  };
  const std::vector<QuadraturePoint>& quadrature() const noexcept { return quad_; }

 private:
  friend DiscreteOperator assemble(const CoefficientProfile&, int);
  explicit DiscreteOperator(CoefficientProfile profile) : profile_(std::move(profile)) {}

  CoefficientProfile profile_;
  int elements_ = 0;
  double length_ = 0.0;
  double h_ = 0.0;
  BandedSymmetric stiffness_;
  BandedSymmetric mass_;
  std::vector<double> trace_;
  std::vector<QuadraturePoint> quad_;
};

DiscreteOperator assemble(const CoefficientProfile& profile, int elements);

// Second derivative at x = length of the last-element cubic.
double boundary_trace(const DiscreteOperator& op, std::span<const double> u);
double boundary_trace_full(const DiscreteOperator& op, std::span<const double> full);

// Two-level Richardson estimate of u''(length): (4 t_fine - t_coarse) / 3.
double richardson_trace(double coarse, double fine);

// Hermite cubic shape functions on the reference cell s in [0, 1] for a cell
// of width h; derivative is with respect to x.
struct HermiteShape {
  double n[4];
};
HermiteShape hermite_shape(double s, double h, int derivative);

}  // namespace biharm
