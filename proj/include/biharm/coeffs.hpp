#pragma once

#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "biharm/quadrature.hpp"

namespace biharm {

// How one coefficient is described before it is turned into a callable profile.
struct CoefficientSpec {
  enum class Kind { kPolynomial, kSamples };

  Kind kind = Kind::kPolynomial;
  std::vector<double> poly;                        // a0 + a1 x + a2 x^2 + ...
  std::vector<std::pair<double, double>> samples;  // (x, value), x strictly increasing

  static CoefficientSpec constant(double value) { return polynomial({value}); }
  static CoefficientSpec polynomial(std::vector<double> coefficients);
  static CoefficientSpec sampled(std::vector<std::pair<double, double>> table);
};

struct ProfileSpec {
  double length = 1.0;
  CoefficientSpec rho = CoefficientSpec::constant(1.0);
  CoefficientSpec sigma = CoefficientSpec::constant(1.0);
  CoefficientSpec q = CoefficientSpec::constant(0.0);
};

// Shape-preserving (Fritsch-Carlson) piecewise cubic through a sample table.
// On every interval the interpolant stays between the two endpoint values, so
// positive data can never produce a nonpositive interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

class Polynomial {
 public:
  explicit Polynomial(std::vector<double> coefficients);

  double operator()(double x) const;

 private:
  std::vector<double> c_;
};

class Coefficient {
 public:
  explicit Coefficient(Polynomial p) : impl_(std::move(p)) {}
  explicit Coefficient(MonotoneCubic m) : impl_(std::move(m)) {}

  double operator()(double x) const {
    return std::visit([x](const auto& f) { return f(x); }, impl_);
  }

 private:
  std::variant<Polynomial, MonotoneCubic> impl_;
};

// Admissible physical data (rho, sigma, q, length). Immutable once built:
// rho > 0, sigma > 0 and q >= 0 have been verified on the validation grid.
class CoefficientProfile {
 public:
  double length() const noexcept { return length_; }
  double rho(double x) const { return rho_(x); }
  double sigma(double x) const { return sigma_(x); }
  double q(double x) const { return q_(x); }

  // Re-check the positivity invariants at extra abscissae (e.g. element
  // quadrature nodes). Throws ProfileError naming the worst offender.
  void validate_at(std::span<const double> xs) const;

 private:
  friend CoefficientProfile build_profile(const ProfileSpec& spec);
  CoefficientProfile(double length, Coefficient rho, Coefficient sigma, Coefficient q)
      : length_(length), rho_(std::move(rho)), sigma_(std::move(sigma)), q_(std::move(q)) {}

  double length_;
  Coefficient rho_;
  Coefficient sigma_;
  Coefficient q_;
};

inline constexpr int kValidationGridPoints = 4096;
inline constexpr int kGeometryCells = 256;
inline constexpr int kGeometryOrder = 4;

// Throws Error(kArgument) for malformed specs and ProfileError for positivity
// violations found on the 4096-point grid plus the default geometry nodes.
CoefficientProfile build_profile(const ProfileSpec& spec);

// Optical length gamma = int_0^l (rho/sigma)^{1/4}, amplitude factor
// zeta(x) = (rho^{3/4} sigma^{1/4})^{-1/2}, and the travel coordinate X(x).
class WaveGeometry {
 public:
  double gamma() const noexcept { return gamma_; }
  // Conservative bound on |gamma - exact|, from comparison with a rule of
  // twice the cells and twice the order.
  double gamma_error() const noexcept { return gamma_error_; }
  int order() const noexcept { return order_; }
  int cells() const noexcept { return cells_; }

  double zeta(double x) const;
  double travel(double x) const;  // X(x); X(0) = 0, X(length) = gamma
  const CoefficientProfile& profile() const noexcept { return *profile_; }

  const std::vector<QuadratureNode>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& zeta_table() const noexcept { return zeta_table_; }

 private:
  friend WaveGeometry geometry(const CoefficientProfile&, int, int);
  WaveGeometry() = default;

  std::shared_ptr<const CoefficientProfile> profile_;
  int order_ = 0;
  int cells_ = 0;
  double gamma_ = 0.0;
  double gamma_error_ = 0.0;
  GaussRule rule_;
  std::vector<double> cumulative_;  // X at the left end of each cell, plus X(length)
  std::vector<QuadratureNode> nodes_;
  std::vector<double> zeta_table_;
};

WaveGeometry geometry(const CoefficientProfile& profile, int quadrature_order = kGeometryOrder,
                      int cells = kGeometryCells);

// Integrand of gamma.
double slowness(const CoefficientProfile& profile, double x);

}  // namespace biharm
