#pragma once

#include <vector>

#include "biharm/coeffs.hpp"
#include "biharm/spectrum.hpp"

namespace biharm {

// Positive roots of cos(mu g) cosh(mu g) = 1, found by bisection of the
// equivalent, overflow-free cos(mu g) - sech(mu g) on the brackets
// (k pi / g, (k + 1) pi / g), k = 1, 2, ...; the k-th bracket holds exactly
// one root, which approaches (k + 1/2) pi / g.
std::vector<double> characteristic_roots(double gamma, int count);
std::vector<double> characteristic_roots(const WaveGeometry& geometry, int count);

// |cos(mu g) - sech(mu g)|, i.e. the characteristic residual scaled by cosh.
double characteristic_residual(double gamma, double mu);

struct AsymptoticModel {
  WaveGeometry geometry;
  std::vector<double> mu_tilde;
  double spacing = 0.0;       // pi / gamma
  double gap_constant = 0.0;  // (pi / gamma)^4
};

AsymptoticModel make_model(const WaveGeometry& geometry, int count);

struct SpacingRow {
  int n = 0;
  double delta_mu = 0.0;    // mu_{n+1} - mu_n
  double normalized = 0.0;  // delta_mu * gamma / pi
};

struct SpacingReport {
  std::vector<SpacingRow> rows;
  // Integer k minimizing sum (mu_n - (n + k - 1/2) pi / gamma)^2 over the
  // trusted modes. For clamped ends k = 1.
  int index_offset = 0;
};

SpacingReport spacing_report(const SpectralData& spec, const WaveGeometry& geometry);

struct GapRow {
  int n = 0;
  double gap = 0.0;         // lambda_{n+1} - lambda_n
  double normalized = 0.0;  // gap / (4 (n + k - 1/2)^3 (pi / gamma)^4)
  bool diagnostic = false;  // n = 1: outside the asymptotic regime
};

struct GapReport {
  std::vector<GapRow> rows;
  int index_offset = 0;
};

GapReport gap_report(const SpectralData& spec, const WaveGeometry& geometry);

// Same normalization applied to an arbitrary ascending sequence of mu's
// (e.g. the characteristic roots themselves); row n uses mus[n-1], mus[n].
GapReport gap_report_from_mus(const std::vector<double>& mus, double gamma, int index_offset = 1);

// Leading-order eigenfunction shape
//   2 zeta(x) / (gamma e^{mu g}) [ (cos mu g - cosh mu g)(cos mu X - cosh mu X)
//                                + (sin mu g + sinh mu g)(sin mu X - sinh mu X) ]
// with mu the n-th characteristic root (1-based). For mu g > 30 the
// exponentials are regrouped so nothing overflows.
double eigenfunction_asymptote(const AsymptoticModel& model, int n, double x);

inline constexpr double kStableEvaluationThreshold = 30.0;

struct TraceRow {
  int n = 0;
  double scaled_trace = 0.0;  // |t_n| / sqrt(lambda_n)
  double ratio = 0.0;         // scaled_trace / limit
};

struct TraceReport {
  std::vector<TraceRow> rows;
  double limit = 0.0;  // 2 zeta(l) sqrt(rho(l) / sigma(l)) / gamma
};

double trace_limit(const CoefficientProfile& profile, const WaveGeometry& geometry);

// Limit of |t_n| / sqrt(lambda_n) for modes of unit L2_rho norm. With the
// 2 / gamma prefactor the leading shape has L2_rho norm tending to
// 1 / sqrt(gamma), so this is trace_limit * sqrt(gamma). Equal when gamma = 1.
double unit_norm_trace_limit(const CoefficientProfile& profile, const WaveGeometry& geometry);
TraceReport trace_limit_report(const SpectralData& spec, const CoefficientProfile& profile,
                               const WaveGeometry& geometry);

}  // namespace biharm
