#include "biharm/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {

namespace {

constexpr double kPi = std::numbers::pi;

double sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

double reduced_characteristic(double gamma, double mu) {
  return std::cos(mu * gamma) - sech(mu * gamma);
}

}  // namespace

double characteristic_residual(double gamma, double mu) { return std::abs(reduced_characteristic(gamma, mu)); }

std::vector<double> characteristic_roots(double gamma, int count) {
  if (count < 1) throw Error(ErrorKind::kArgument, "characteristic_roots: count must be >= 1");
  if (!(gamma > 0.0)) throw Error(ErrorKind::kArgument, "characteristic_roots: gamma must be positive");
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    double lo = k * kPi / gamma;
    double hi = (k + 1) * kPi / gamma;
    double flo = reduced_characteristic(gamma, lo);
    const double fhi = reduced_characteristic(gamma, hi);
    if (!(flo * fhi < 0.0)) {
      std::ostringstream os;
      os << "characteristic_roots: bracket " << k << " does not change sign";
      throw Error(ErrorKind::kNumerical, os.str());
    }
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = reduced_characteristic(gamma, mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double root = 0.5 * (lo + hi);
    if (characteristic_residual(gamma, root) > 1e-10) {
      throw Error(ErrorKind::kNumerical, "characteristic_roots: bisection did not reach the residual target");
    }
    roots.push_back(root);
  }
  return roots;
}

std::vector<double> characteristic_roots(const WaveGeometry& geometry, int count) {
  return characteristic_roots(geometry.gamma(), count);
}

AsymptoticModel make_model(const WaveGeometry& geometry, int count) {
  AsymptoticModel model{geometry, characteristic_roots(geometry, count), kPi / geometry.gamma(), 0.0};
  model.gap_constant = std::pow(model.spacing, 4);
  return model;
}

namespace {

int fit_offset(const std::vector<double>& mus, int limit, double gamma) {
  double acc = 0.0;
  for (int n = 1; n <= limit; ++n) acc += mus[static_cast<std::size_t>(n - 1)] * gamma / kPi - n + 0.5;
  return static_cast<int>(std::lround(acc / limit));
}

}  // namespace

SpacingReport spacing_report(const SpectralData& spec, const WaveGeometry& geometry) {
  const int trusted = std::min<int>(spec.trusted_count, static_cast<int>(spec.size()));
  if (trusted < 3) throw Error(ErrorKind::kArgument, "spacing_report: needs at least 3 trusted modes");
  const double gamma = geometry.gamma();
  SpacingReport report;
  report.index_offset = fit_offset(spec.mus, trusted, gamma);
  for (int n = 1; n < trusted; ++n) {
    const double d = spec.mus[static_cast<std::size_t>(n)] - spec.mus[static_cast<std::size_t>(n - 1)];
    report.rows.push_back({n, d, d * gamma / kPi});
  }
  return report;
}

GapReport gap_report_from_mus(const std::vector<double>& mus, double gamma, int index_offset) {
  GapReport report;
  report.index_offset = index_offset;
  const double c = std::pow(kPi / gamma, 4);
  for (std::size_t i = 0; i + 1 < mus.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    const double gap = std::pow(mus[i + 1], 4) - std::pow(mus[i], 4);
    const double a = n + index_offset - 0.5;
    report.rows.push_back({n, gap, gap / (4.0 * a * a * a * c), n == 1});
  }
  return report;
}

GapReport gap_report(const SpectralData& spec, const WaveGeometry& geometry) {
  const int trusted = std::min<int>(spec.trusted_count, static_cast<int>(spec.size()));
  if (trusted < 5) throw Error(ErrorKind::kArgument, "gap_report: needs at least 5 trusted modes");
  const double gamma = geometry.gamma();
  GapReport report;
  report.index_offset = fit_offset(spec.mus, trusted, gamma);
  const double c = std::pow(kPi / gamma, 4);
  for (int n = 1; n < trusted; ++n) {
    const double gap = spec.lambdas[static_cast<std::size_t>(n)] - spec.lambdas[static_cast<std::size_t>(n - 1)];
    const double a = n + report.index_offset - 0.5;
    report.rows.push_back({n, gap, gap / (4.0 * a * a * a * c), n == 1});
  }
  return report;
}

double eigenfunction_asymptote(const AsymptoticModel& model, int n, double x) {
  if (n < 1 || n > static_cast<int>(model.mu_tilde.size())) {
    throw Error(ErrorKind::kArgument, "eigenfunction_asymptote: mode index out of range");
  }
  const auto& geo = model.geometry;
  const double length = geo.profile().length();
  if (x < 0.0 || x > length) throw Error(ErrorKind::kArgument, "eigenfunction_asymptote: x outside [0, l]");
  const double gamma = geo.gamma();
  const double mu = model.mu_tilde[static_cast<std::size_t>(n - 1)];
  const double a = mu * gamma;
  const double b = mu * geo.travel(x);
  const double prefactor = 2.0 * geo.zeta(x) / gamma;

  if (a <= kStableEvaluationThreshold) {
    const double bracket = (std::cos(a) - std::cosh(a)) * (std::cos(b) - std::cosh(b)) +
                           (std::sin(a) + std::sinh(a)) * (std::sin(b) - std::sinh(b));
    return prefactor * bracket * std::exp(-a);
  }
  // Expand the products, combine cos/cosh pairs into functions of (a - b),
  // and distribute e^{-a} over the growing exponentials.
  const double ea = std::exp(-a);
  const double e2a = ea * ea;
  const double ebma = std::exp(b - a);
  const double embma = std::exp(-b - a);
  const double scaled = std::cos(a - b) * ea - std::cos(a) * 0.5 * (ebma + embma) -
                        std::sin(a) * 0.5 * (ebma - embma) - std::cos(b) * 0.5 * (1.0 + e2a) +
                        std::sin(b) * 0.5 * (1.0 - e2a) + 0.5 * (std::exp(-b) + std::exp(b - 2.0 * a));
  return prefactor * scaled;
}

double trace_limit(const CoefficientProfile& profile, const WaveGeometry& geometry) {
  const double l = profile.length();
  return 2.0 * geometry.zeta(l) * std::sqrt(profile.rho(l) / profile.sigma(l)) / geometry.gamma();
}

double unit_norm_trace_limit(const CoefficientProfile& profile, const WaveGeometry& geometry) {
  return trace_limit(profile, geometry) * std::sqrt(geometry.gamma());
}

TraceReport trace_limit_report(const SpectralData& spec, const CoefficientProfile& profile,
                               const WaveGeometry& geometry) {
  const int trusted = std::min<int>(spec.trusted_count, static_cast<int>(spec.size()));
  if (trusted < 5) throw Error(ErrorKind::kArgument, "trace_limit_report: needs at least 5 trusted modes");
  TraceReport report;
  report.limit = trace_limit(profile, geometry);
  for (int n = 1; n <= trusted; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    const double scaled = std::abs(spec.traces[i]) / std::sqrt(spec.lambdas[i]);
    report.rows.push_back({n, scaled, scaled / report.limit});
  }
  return report;
}

}  // namespace biharm
