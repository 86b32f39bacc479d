#include "biharm/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {

CoefficientSpec CoefficientSpec::polynomial(std::vector<double> coefficients) {
  CoefficientSpec s;
  s.kind = Kind::kPolynomial;
  s.poly = std::move(coefficients);
  return s;
}

CoefficientSpec CoefficientSpec::sampled(std::vector<std::pair<double, double>> table) {
  CoefficientSpec s;
  s.kind = Kind::kSamples;
  s.samples = std::move(table);
  return s;
}

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) throw Error(ErrorKind::kArgument, "polynomial coefficient list is empty");
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

// Three-point end slope with the usual shape-preserving corrections.
double end_slope(double h0, double h1, double d0, double d1) {
  double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (std::signbit(s) != std::signbit(d0) || s == 0.0) {
    s = 0.0;
  } else if (std::signbit(d0) != std::signbit(d1) && std::abs(s) > 3.0 * std::abs(d0)) {
    s = 3.0 * d0;
  }
  return s;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw Error(ErrorKind::kArgument, "sample table needs at least two (x, value) pairs");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw Error(ErrorKind::kArgument, "sample abscissae must be strictly increasing");
    }
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      slope_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
         (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * slope_[i + 1];
}

namespace {

Coefficient make_coefficient(const CoefficientSpec& spec, double length, const char* name) {
  if (spec.kind == CoefficientSpec::Kind::kPolynomial) {
    for (double c : spec.poly) {
      if (!std::isfinite(c)) {
        throw Error(ErrorKind::kArgument, std::string(name) + ": non-finite polynomial coefficient");
      }
    }
    return Coefficient(Polynomial(spec.poly));
  }
  if (spec.samples.size() < 2) {
    throw Error(ErrorKind::kArgument, std::string(name) + ": sample table needs at least two points");
  }
  const double tol = 1e-12 * length;
  if (spec.samples.front().first > tol || spec.samples.back().first < length - tol) {
    std::ostringstream os;
    os << name << ": samples must cover [0, " << length << "]";
    throw Error(ErrorKind::kArgument, os.str());
  }
  std::vector<double> xs, ys;
  for (const auto& [x, v] : spec.samples) {
    if (!std::isfinite(x) || !std::isfinite(v)) {
      throw Error(ErrorKind::kArgument, std::string(name) + ": non-finite sample");
    }
    xs.push_back(x);
    ys.push_back(v);
  }
  return Coefficient(MonotoneCubic(std::move(xs), std::move(ys)));
}

}  // namespace

void CoefficientProfile::validate_at(std::span<const double> xs) const {
  // Track the worst violation per coefficient; report the worst overall.
  const char* worst_name = nullptr;
  double worst_value = 0.0;
  double worst_x = 0.0;
  double worst_excess = 0.0;
  auto check = [&](const char* name, double x, double v, bool strict) {
    const bool bad = !std::isfinite(v) || (strict ? v <= 0.0 : v < 0.0);
    if (!bad) return;
    const double excess = std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    if (worst_name == nullptr || excess > worst_excess) {
      worst_name = name;
      worst_value = v;
      worst_x = x;
      worst_excess = excess;
    }
  };
  for (double x : xs) {
    check("rho", x, rho_(x), true);
    check("sigma", x, sigma_(x), true);
    check("q", x, q_(x), false);
  }
  if (worst_name != nullptr) {
    std::ostringstream os;
    os.precision(6);
    os << "coefficient " << worst_name << " violates positivity at x=" << worst_x
       << " (value " << worst_value << ")";
    throw ProfileError(os.str(), worst_x);
  }
}

CoefficientProfile build_profile(const ProfileSpec& spec) {
  if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
    throw Error(ErrorKind::kArgument, "profile length must be positive");
  }
  CoefficientProfile profile(spec.length, make_coefficient(spec.rho, spec.length, "rho"),
                             make_coefficient(spec.sigma, spec.length, "sigma"),
                             make_coefficient(spec.q, spec.length, "q"));
  std::vector<double> xs;
  xs.reserve(kValidationGridPoints + kGeometryCells * kGeometryOrder);
  for (int i = 0; i < kValidationGridPoints; ++i) {
    xs.push_back(spec.length * i / (kValidationGridPoints - 1));
  }
  for (const auto& node : composite_gauss(0.0, spec.length, kGeometryCells, kGeometryOrder)) {
    xs.push_back(node.x);
  }
  profile.validate_at(xs);
  return profile;
}

double slowness(const CoefficientProfile& profile, double x) {
  return std::pow(profile.rho(x) / profile.sigma(x), 0.25);
}

namespace {

double composite_gamma(const CoefficientProfile& profile, int cells, int order) {
  double sum = 0.0;
  for (const auto& node : composite_gauss(0.0, profile.length(), cells, order)) {
    sum += node.w * slowness(profile, node.x);
  }
  return sum;
}

}  // namespace

WaveGeometry geometry(const CoefficientProfile& profile, int quadrature_order, int cells) {
  if (quadrature_order < 2) throw Error(ErrorKind::kArgument, "quadrature order must be >= 2");
  if (cells < 1) throw Error(ErrorKind::kArgument, "geometry needs at least one cell");
  WaveGeometry g;
  g.profile_ = std::make_shared<const CoefficientProfile>(profile);
  g.order_ = quadrature_order;
  g.cells_ = cells;
  g.rule_ = gauss_legendre(quadrature_order);
  g.nodes_ = composite_gauss(0.0, profile.length(), cells, quadrature_order);

  std::vector<double> xs;
  xs.reserve(g.nodes_.size());
  for (const auto& n : g.nodes_) xs.push_back(n.x);
  profile.validate_at(xs);

  g.cumulative_.assign(static_cast<std::size_t>(cells) + 1, 0.0);
  g.zeta_table_.reserve(g.nodes_.size());
  for (int c = 0; c < cells; ++c) {
    double cell = 0.0;
    for (int k = 0; k < quadrature_order; ++k) {
      const auto& node = g.nodes_[static_cast<std::size_t>(c) * quadrature_order + k];
      cell += node.w * slowness(profile, node.x);
      g.zeta_table_.push_back(g.zeta(node.x));
    }
    g.cumulative_[c + 1] = g.cumulative_[c] + cell;
  }
  g.gamma_ = g.cumulative_.back();
  const double refined = composite_gamma(profile, 2 * cells, 2 * quadrature_order);
  g.gamma_error_ = 2.0 * std::abs(g.gamma_ - refined) +
                   16.0 * std::numeric_limits<double>::epsilon() * g.gamma_;
  return g;
}

double WaveGeometry::zeta(double x) const {
  return std::pow(profile_->rho(x), -0.375) * std::pow(profile_->sigma(x), -0.125);
}

double WaveGeometry::travel(double x) const {
  const double length = profile_->length();
  if (x <= 0.0) return 0.0;
  if (x >= length) return gamma_;
  const double h = length / cells_;
  const int c = std::min(static_cast<int>(x / h), cells_ - 1);
  const double a = c * h;
  const double half = 0.5 * (x - a);
  double partial = 0.0;
  for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
    partial += half * rule_.weights[k] * slowness(*profile_, a + half * (1.0 + rule_.nodes[k]));
  }
  return cumulative_[c] + partial;
}

}  // namespace biharm
