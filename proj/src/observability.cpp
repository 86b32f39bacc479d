#include "biharm/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {

GramSystem gram(std::span<const double> lambdas, double T, std::optional<std::span<const double>> traces) {
  if (!(T > 0.0)) throw Error(ErrorKind::kArgument, "gram: horizon must be positive");
  const auto n = static_cast<Eigen::Index>(lambdas.size());
  if (n == 0) throw Error(ErrorKind::kArgument, "gram: empty frequency list");
  double scale = 0.0;
  for (double l : lambdas) scale = std::max(scale, std::abs(l));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(lambdas[i] - lambdas[j]) <= 1e-14 * scale) {
        std::ostringstream os;
        os << "gram: duplicate frequencies at positions " << i + 1 << " and " << j + 1;
        throw Error(ErrorKind::kArgument, os.str());
      }
    }
  }
  GramSystem g;
  g.T = T;
  g.lambdas.assign(lambdas.begin(), lambdas.end());
  g.G.resize(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    g.G(m, m) = Complex{T, 0.0};
    for (Eigen::Index k = m + 1; k < n; ++k) {
      // (e^{i d T} - 1) / (i d), written without the cancellation at small d.
      const Complex v = phase_integral(lambdas[k] - lambdas[m], T);
      g.G(m, k) = v;
      g.G(k, m) = std::conj(v);
    }
  }
  if (traces) {
    if (traces->size() != lambdas.size()) throw Error(ErrorKind::kArgument, "gram: trace count mismatch");
    Eigen::MatrixXcd w = g.G;
    for (Eigen::Index m = 0; m < n; ++m) {
      for (Eigen::Index k = 0; k < n; ++k) w(m, k) *= (*traces)[m] * (*traces)[k];
    }
    g.weighted = std::move(w);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g.G, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(n - 1);
  g.min_eigenvalue = lo;
  g.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return g;
}

Complex boundary_output(const ModalState& state, const SpectralData& spec, double t) {
  if (state.basis_ref != spec.fingerprint) throw Error(ErrorKind::kArgument, "boundary_output: foreign state");
  Complex acc{};
  for (std::size_t n = 0; n < state.coefficients.size(); ++n) {
    acc += state.coefficients[n] * std::polar(1.0, spec.lambdas[n] * t) * spec.traces[n];
  }
  return acc;
}

ObservabilityReport observability_constants(const SpectralData& spec, double T, int N) {
  if (N < 1 || N > spec.trusted_count) {
    throw Error(ErrorKind::kArgument, "observability_constants: N must be in [1, trusted_count]");
  }
  const std::span<const double> lambdas(spec.lambdas.data(), static_cast<std::size_t>(N));
  const std::span<const double> traces(spec.traces.data(), static_cast<std::size_t>(N));
  const GramSystem g = gram(lambdas, T, traces);
  Eigen::MatrixXcd s = *g.weighted;
  for (Eigen::Index m = 0; m < N; ++m) {
    for (Eigen::Index k = 0; k < N; ++k) s(m, k) /= std::sqrt(lambdas[m] * lambdas[k]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
  ObservabilityReport r;
  r.T = T;
  r.N = N;
  r.c_T = eig.eigenvalues()(0);
  r.C_T = eig.eigenvalues()(N - 1);
  r.condition = g.condition;
  r.resolution_failure = !(r.c_T > 0.0);
  const std::span<const double> trusted(spec.lambdas.data(), static_cast<std::size_t>(spec.trusted_count));
  if (trusted.size() >= 10) {
    const auto est = beurling_density(trusted, default_density_windows(trusted));
    r.density = est.estimates.back();
  } else {
    r.density = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

double observability_quotient(const ModalState& state, const SpectralData& spec, double T) {
  const auto N = state.coefficients.size();
  const GramSystem g = gram(std::span<const double>(spec.lambdas.data(), N), T,
                            std::span<const double>(spec.traces.data(), N));
  Eigen::VectorXcd c(static_cast<Eigen::Index>(N));
  double energy = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    c(static_cast<Eigen::Index>(n)) = state.coefficients[n];
    energy += spec.lambdas[n] * std::norm(state.coefficients[n]);
  }
  const double output = (c.adjoint() * (*g.weighted) * c)(0, 0).real();
  return output / energy;
}

DensityEstimate beurling_density(std::span<const double> values, std::span<const double> windows) {
  if (values.size() < 10) throw Error(ErrorKind::kArgument, "beurling_density: need at least 10 values");
  if (!std::is_sorted(values.begin(), values.end())) {
    throw Error(ErrorKind::kArgument, "beurling_density: values must be ascending");
  }
  DensityEstimate out;
  for (double r : windows) {
    if (!(r > 0.0)) throw Error(ErrorKind::kArgument, "beurling_density: window lengths must be positive");
    // The maximal count is attained by a window starting at a sequence point.
    std::size_t best = 0;
    std::size_t hi = 0;
    for (std::size_t lo = 0; lo < values.size(); ++lo) {
      if (hi < lo) hi = lo;
      while (hi < values.size() && values[hi] < values[lo] + r) ++hi;
      best = std::max(best, hi - lo);
    }
    out.windows.push_back(r);
    out.estimates.push_back(static_cast<double>(best) / r);
  }
  out.nonincreasing = true;
  for (std::size_t i = 1; i < out.estimates.size(); ++i) {
    if (out.windows[i] > out.windows[i - 1] && out.estimates[i] > out.estimates[i - 1]) out.nonincreasing = false;
  }
  return out;
}

std::vector<double> default_density_windows(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kArgument, "default_density_windows: empty sequence");
  std::vector<double> r;
  for (int k = 6; k >= 1; --k) r.push_back(values.back() * std::pow(10.0, -k));
  return r;
}

}  // namespace biharm
