#include "biharm/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {

namespace {

// Factored K - shift * M in LAPACK general band storage.
class ShiftedBandLu {
 public:
  ShiftedBandLu(const BandedSymmetric& k, const BandedSymmetric& m, double shift)
      : n_(static_cast<lapack_int>(k.size())),
        kd_(static_cast<lapack_int>(k.bandwidth())),
        ldab_(3 * kd_ + 1),
        ab_(static_cast<std::size_t>(ldab_) * n_, 0.0),
        ipiv_(static_cast<std::size_t>(n_)) {
    for (lapack_int j = 0; j < n_; ++j) {
      const lapack_int i0 = std::max<lapack_int>(0, j - kd_);
      const lapack_int i1 = std::min<lapack_int>(n_ - 1, j + kd_);
      for (lapack_int i = i0; i <= i1; ++i) {
        ab_[static_cast<std::size_t>(2 * kd_ + i - j + j * ldab_)] =
            k(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) -
            shift * m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
    info_ = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kd_, kd_, ab_.data(), ldab_, ipiv_.data());
  }

  bool singular() const noexcept { return info_ != 0; }

  void solve(std::vector<double>& rhs) const {
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kd_, kd_, 1, ab_.data(), ldab_,
                                           ipiv_.data(), rhs.data(), n_);
    if (info != 0) throw Error(ErrorKind::kNumerical, "banded solve failed during inverse iteration");
  }

 private:
  lapack_int n_;
  lapack_int kd_;
  lapack_int ldab_;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
  lapack_int info_ = 0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void check_mass_spd(const BandedSymmetric& m) {
  std::vector<double> ab(m.storage().begin(), m.storage().end());
  const lapack_int info =
      LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', static_cast<lapack_int>(m.size()),
                     static_cast<lapack_int>(m.bandwidth()), ab.data(),
                     static_cast<lapack_int>(m.leading_dimension()));
  if (info != 0) {
    std::ostringstream os;
    os << "mass matrix Cholesky factorization broke down at pivot " << info << " (matrix not SPD)";
    throw Error(ErrorKind::kNumerical, os.str());
  }
}

// Lowest `count` eigenvalues. The pencil is solved in inverted form
// M x = nu K x so that the wanted (smallest) lambdas are the dominant nu's,
// whose absolute accuracy is relative to 1 / lambda_1.
std::vector<double> lowest_eigenvalues(const DiscreteOperator& op, int count) {
  const auto& k = op.stiffness();
  const auto& m = op.mass();
  const lapack_int n = static_cast<lapack_int>(k.size());
  const lapack_int kd = static_cast<lapack_int>(k.bandwidth());
  const lapack_int ld = kd + 1;
  std::vector<double> ab(m.storage().begin(), m.storage().end());
  std::vector<double> bb(k.storage().begin(), k.storage().end());
  std::vector<double> q(1), z(1), w(static_cast<std::size_t>(n));
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info =
      LAPACKE_dsbgvx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, kd, ab.data(), ld, bb.data(), ld, q.data(), 1,
                     0.0, 0.0, n - count + 1, n, abstol, &found, w.data(), z.data(), 1, ifail.data());
  if (info > n) {
    throw Error(ErrorKind::kNumerical, "stiffness matrix factorization broke down (K not positive definite)");
  }
  if (info != 0 || found != count) {
    std::ostringstream os;
    os << "banded generalized eigensolver failed (info=" << info << ", found " << found << " of " << count << ")";
    throw Error(ErrorKind::kNumerical, os.str());
  }
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(count));
  for (lapack_int i = found - 1; i >= 0; --i) {
    const double nu = w[static_cast<std::size_t>(i)];
    if (!(nu > 0.0)) throw Error(ErrorKind::kNumerical, "nonpositive eigenvalue encountered");
    lambdas.push_back(1.0 / nu);
  }
  return lambdas;
}

}  // namespace

std::uint64_t spectrum_fingerprint(int elements, const std::vector<double>& lambdas) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&elements, sizeof elements);
  for (double l : lambdas) mix(&l, sizeof l);
  return h;
}

SpectralData solve_spectrum(const DiscreteOperator& op, int count) {
  const std::size_t n = op.dofs();
  if (count < 1 || static_cast<std::size_t>(count) > n) {
    std::ostringstream os;
    os << "solve_spectrum: count must be in [1, " << n << "], got " << count;
    throw Error(ErrorKind::kArgument, os.str());
  }
  const auto& k = op.stiffness();
  const auto& m = op.mass();
  check_mass_spd(m);
  const auto estimates = lowest_eigenvalues(op, count);

  SpectralData spec;
  spec.op = std::make_shared<const DiscreteOperator>(op);
  std::vector<std::vector<double>> m_modes;  // M * phi, cached for orthogonalization
  std::mt19937_64 rng(0x5eedULL);
  const double k_norm = k.max_abs_row_sum();
  const double m_norm = m.max_abs_row_sum();

  for (int idx = 0; idx < count; ++idx) {
    double shift = estimates[static_cast<std::size_t>(idx)];
    ShiftedBandLu lu(k, m, shift);
    if (lu.singular()) lu = ShiftedBandLu(k, m, shift * (1.0 + 1e-13));

    std::vector<double> x(n);
    for (auto& v : x) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    for (int iter = 0; iter < 3; ++iter) {
      auto rhs = m.multiply(x);
      lu.solve(rhs);
      const double scale = std::sqrt(m.quadratic_form(rhs, rhs));
      if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorKind::kNumerical, "inverse iteration produced a degenerate vector");
      }
      for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / scale;
    }
    // Two passes of modified Gram-Schmidt in the M inner product.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < spec.modes.size(); ++j) {
        const double c = dot(m_modes[j], x);
        for (std::size_t i = 0; i < n; ++i) x[i] -= c * spec.modes[j][i];
      }
    }
    const double mnorm = std::sqrt(m.quadratic_form(x, x));
    for (auto& v : x) v /= mnorm;

    const double lambda = op.stiffness_form(x, x) / m.quadratic_form(x, x);
    if (!(lambda > 0.0)) throw Error(ErrorKind::kNumerical, "nonpositive eigenvalue encountered");
    double trace = boundary_trace(op, x);
    if (trace < 0.0) {
      for (auto& v : x) v = -v;
      trace = -trace;
    }
    const auto kx = k.multiply(x);
    const auto mx = m.multiply(x);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = kx[i] - lambda * mx[i];
    const double residual = norm2(r) / ((k_norm + lambda * m_norm) * norm2(x));

    spec.lambdas.push_back(lambda);
    spec.mus.push_back(std::pow(lambda, 0.25));
    spec.traces.push_back(trace);
    spec.residuals.push_back(residual);
    spec.modes.push_back(std::move(x));
    m_modes.push_back(mx);
  }
  for (std::size_t i = 0; i < spec.residuals.size(); ++i) {
    if (!(spec.residuals[i] <= kResidualTolerance)) {
      std::ostringstream os;
      os << "eigenpair " << i + 1 << " residual " << spec.residuals[i] << " exceeds " << kResidualTolerance;
      throw Error(ErrorKind::kNumerical, os.str());
    }
  }
  spec.trusted_count = std::min(count, op.elements() / 10);
  spec.fingerprint = spectrum_fingerprint(op.elements(), spec.lambdas);
  return spec;
}

ValidationReport validate_spectrum(const SpectralData& spec, const ValidationOptions& options) {
  if (spec.lambdas.empty()) throw Error(ErrorKind::kArgument, "validate_spectrum: empty spectrum");
  ValidationReport report;
  const int limit = std::clamp(spec.trusted_count, 1, static_cast<int>(spec.size()));
  const bool have_modes = spec.op && spec.modes.size() == spec.size();
  std::vector<std::vector<double>> m_modes;
  if (have_modes) {
    for (int i = 0; i < limit; ++i) m_modes.push_back(spec.op->mass().multiply(spec.modes[static_cast<std::size_t>(i)]));
  }
  auto fail = [&report](int n, const char* kind, const std::string& detail) {
    report.failures.push_back({n, kind, detail});
  };
  for (int i = 0; i < limit; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    ModeCheck mc;
    mc.n = i + 1;
    mc.positive = spec.lambdas[ui] > 0.0;
    if (!mc.positive) fail(mc.n, "positivity", "eigenvalue is not positive");

    double gap = std::numeric_limits<double>::infinity();
    if (ui + 1 < spec.size()) {
      const double g = (spec.lambdas[ui + 1] - spec.lambdas[ui]) / std::abs(spec.lambdas[ui + 1]);
      gap = std::min(gap, g);
      if (i + 1 < limit && !(g > options.gap_tolerance)) {
        std::ostringstream os;
        os << "modes " << mc.n << " and " << mc.n + 1 << " have relative gap " << g;
        fail(mc.n, "simplicity", os.str());
      }
    }
    if (ui > 0) {
      gap = std::min(gap, (spec.lambdas[ui] - spec.lambdas[ui - 1]) / std::abs(spec.lambdas[ui]));
    }
    mc.relative_gap = gap;

    mc.trace_abs = std::abs(spec.traces[ui]);
    if (!(mc.trace_abs > options.trace_floor)) {
      std::ostringstream os;
      os << "|phi''(l)| = " << mc.trace_abs << " is below the floor " << options.trace_floor;
      fail(mc.n, "trace", os.str());
    }

    if (have_modes) {
      double worst = 0.0;
      for (int j = 0; j < limit; ++j) {
        const double g = dot(m_modes[static_cast<std::size_t>(j)], spec.modes[ui]);
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
      mc.orthonormality = worst;
      if (!(worst <= options.orthonormality_tolerance)) {
        std::ostringstream os;
        os << "M-orthonormality defect " << worst;
        fail(mc.n, "orthonormality", os.str());
      }
    }
    report.modes.push_back(mc);
  }
  report.pass = report.failures.empty();
  return report;
}

}  // namespace biharm
