#include "biharm/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biharm/error.hpp"
#include "biharm/quadrature.hpp"

namespace biharm {

HermiteShape hermite_shape(double s, double h, int derivative) {
  switch (derivative) {
    case 0:
      return {{1 - 3 * s * s + 2 * s * s * s, h * (s - 2 * s * s + s * s * s), 3 * s * s - 2 * s * s * s,
               h * (-s * s + s * s * s)}};
    case 1:
      return {{(-6 * s + 6 * s * s) / h, 1 - 4 * s + 3 * s * s, (6 * s - 6 * s * s) / h, -2 * s + 3 * s * s}};
    case 2:
      return {{(-6 + 12 * s) / (h * h), (-4 + 6 * s) / h, (6 - 12 * s) / (h * h), (-2 + 6 * s) / h}};
    case 3:
      return {{12 / (h * h * h), 6 / (h * h), -12 / (h * h * h), 6 / (h * h)}};
    default:
      throw Error(ErrorKind::kArgument, "hermite_shape: derivative order must be 0..3");
  }
}

namespace {

// Full dof index -> constrained index, or -1 for a clamped dof.
long constrained_index(std::size_t full, int elements) {
  const std::size_t node = full / 2;
  if (node == 0 || node == static_cast<std::size_t>(elements)) return -1;
  return static_cast<long>(full) - 2;
}

}  // namespace

DiscreteOperator assemble(const CoefficientProfile& profile, int elements) {
  if (elements < kMinElements) {
    std::ostringstream os;
    os << "assemble: need at least " << kMinElements << " elements, got " << elements;
    throw Error(ErrorKind::kArgument, os.str());
  }
  DiscreteOperator op(profile);
  op.elements_ = elements;
  op.length_ = profile.length();
  op.h_ = op.length_ / elements;
  const double h = op.h_;
  const std::size_t n = op.dofs();
  op.stiffness_ = BandedSymmetric(n, 3);
  op.mass_ = BandedSymmetric(n, 3);

  const GaussRule rule = gauss_legendre(kElementQuadraturePoints);
  std::vector<double> xs;
  op.quad_.reserve(static_cast<std::size_t>(elements) * kElementQuadraturePoints);
  for (int e = 0; e < elements; ++e) {
    for (int k = 0; k < kElementQuadraturePoints; ++k) {
      const double s = 0.5 * (1.0 + rule.nodes[k]);
      const double x = (e + s) * h;
      xs.push_back(x);
      op.quad_.push_back({x, 0.5 * h * rule.weights[k], profile.rho(x), profile.sigma(x), profile.q(x)});
    }
  }
  profile.validate_at(xs);

  for (int e = 0; e < elements; ++e) {
    double ke[4][4] = {};
    double me[4][4] = {};
    for (int k = 0; k < kElementQuadraturePoints; ++k) {
      const auto& qp = op.quad_[static_cast<std::size_t>(e) * kElementQuadraturePoints + k];
      const double s = 0.5 * (1.0 + rule.nodes[k]);
      const auto n0 = hermite_shape(s, h, 0);
      const auto n1 = hermite_shape(s, h, 1);
      const auto n2 = hermite_shape(s, h, 2);
      for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
          ke[a][b] += qp.w * (qp.sigma * n2.n[a] * n2.n[b] + qp.q * n1.n[a] * n1.n[b]);
          me[a][b] += qp.w * qp.rho * n0.n[a] * n0.n[b];
        }
      }
    }
    const std::size_t base = 2 * static_cast<std::size_t>(e);
    for (int a = 0; a < 4; ++a) {
      const long ia = constrained_index(base + a, elements);
      if (ia < 0) continue;
      for (int b = a; b < 4; ++b) {
        const long ib = constrained_index(base + b, elements);
        if (ib < 0) continue;
        op.stiffness_.add(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib), ke[a][b]);
        op.mass_.add(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib), me[a][b]);
      }
    }
  }

  // u''(l) on the last cell with u(l) = u'(l) = 0: (6 u_{E-1} + 2 h u'_{E-1}) / h^2.
  op.trace_.assign(n, 0.0);
  op.trace_[n - 2] = 6.0 / (h * h);
  op.trace_[n - 1] = 2.0 / h;
  return op;
}

std::vector<double> DiscreteOperator::expand(std::span<const double> u) const {
  if (u.size() != dofs()) throw Error(ErrorKind::kArgument, "expand: vector size does not match the dof space");
  std::vector<double> full(full_dofs(), 0.0);
  std::copy(u.begin(), u.end(), full.begin() + 2);
  return full;
}

std::vector<double> DiscreteOperator::restrict_to_interior(std::span<const double> full) const {
  if (full.size() != full_dofs()) throw Error(ErrorKind::kArgument, "restrict: vector size does not match");
  return {full.begin() + 2, full.begin() + 2 + static_cast<long>(dofs())};
}

double DiscreteOperator::evaluate_full(std::span<const double> full, double x, int derivative) const {
  if (full.size() != full_dofs()) throw Error(ErrorKind::kArgument, "evaluate: vector size does not match");
  x = std::clamp(x, 0.0, length_);
  const int e = std::min(static_cast<int>(x / h_), elements_ - 1);
  const double s = (x - e * h_) / h_;
  const auto shape = hermite_shape(s, h_, derivative);
  const std::size_t base = 2 * static_cast<std::size_t>(e);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += shape.n[a] * full[base + a];
  return v;
}

double DiscreteOperator::evaluate(std::span<const double> u, double x, int derivative) const {
  return evaluate_full(expand(u), x, derivative);
}

std::vector<double> DiscreteOperator::interpolate(const std::function<double(double)>& f,
                                                  const std::function<double(double)>& df) const {
  std::vector<double> full(full_dofs());
  for (int i = 0; i <= elements_; ++i) {
    const double x = (i == elements_) ? length_ : i * h_;
    full[2 * static_cast<std::size_t>(i)] = f(x);
    full[2 * static_cast<std::size_t>(i) + 1] = df(x);
  }
  return full;
}

namespace {

template <class Integrand>
double element_sum(const DiscreteOperator& op, std::span<const double> u, std::span<const double> v,
                   Integrand integrand) {
  if (u.size() != op.dofs() || v.size() != op.dofs()) {
    throw Error(ErrorKind::kArgument, "form: vector size does not match the dof space");
  }
  const auto fu = op.expand(u);
  const auto fv = op.expand(v);
  const double h = op.h();
  double total = 0.0;
  for (const auto& qp : op.quadrature()) {
    const int e = std::min(static_cast<int>(qp.x / h), op.elements() - 1);
    const double s = (qp.x - e * h) / h;
    const std::size_t base = 2 * static_cast<std::size_t>(e);
    total += qp.w * integrand(qp, s, base, fu, fv);
  }
  return total;
}

double combine(const HermiteShape& shape, const std::vector<double>& full, std::size_t base) {
  return shape.n[0] * full[base] + shape.n[1] * full[base + 1] + shape.n[2] * full[base + 2] +
         shape.n[3] * full[base + 3];
}

}  // namespace

double DiscreteOperator::stiffness_form(std::span<const double> u, std::span<const double> v) const {
  const double h = h_;
  return element_sum(*this, u, v, [h](const QuadraturePoint& qp, double s, std::size_t base,
                                      const std::vector<double>& fu, const std::vector<double>& fv) {
    const auto d1 = hermite_shape(s, h, 1);
    const auto d2 = hermite_shape(s, h, 2);
    return qp.sigma * combine(d2, fu, base) * combine(d2, fv, base) +
           qp.q * combine(d1, fu, base) * combine(d1, fv, base);
  });
}

double DiscreteOperator::mass_form(std::span<const double> u, std::span<const double> v) const {
  const double h = h_;
  return element_sum(*this, u, v, [h](const QuadraturePoint& qp, double s, std::size_t base,
                                      const std::vector<double>& fu, const std::vector<double>& fv) {
    const auto d0 = hermite_shape(s, h, 0);
    return qp.rho * combine(d0, fu, base) * combine(d0, fv, base);
  });
}

double boundary_trace_full(const DiscreteOperator& op, std::span<const double> full) {
  if (full.size() != op.full_dofs()) throw Error(ErrorKind::kArgument, "boundary_trace: size mismatch");
  const double h = op.h();
  const std::size_t b = 2 * static_cast<std::size_t>(op.elements() - 1);
  return (6.0 * full[b] + 2.0 * h * full[b + 1] - 6.0 * full[b + 2] + 4.0 * h * full[b + 3]) / (h * h);
}

double boundary_trace(const DiscreteOperator& op, std::span<const double> u) {
  if (u.size() != op.dofs()) throw Error(ErrorKind::kArgument, "boundary_trace: size mismatch");
  const auto& t = op.trace_vector();
  const std::size_t n = u.size();
  return t[n - 2] * u[n - 2] + t[n - 1] * u[n - 1];
}

double richardson_trace(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

}  // namespace biharm
