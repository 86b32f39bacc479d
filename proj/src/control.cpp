#include "biharm/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {

namespace {

constexpr Complex kI{0.0, 1.0};

std::vector<int> active_modes(std::size_t n, const std::vector<int>& excluded) {
  std::vector<int> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(excluded.begin(), excluded.end(), static_cast<int>(i) + 1) == excluded.end()) {
      active.push_back(static_cast<int>(i));
    }
  }
  return active;
}

GramSystem active_gram(const SpectralData& spec, const std::vector<int>& active, double T) {
  std::vector<double> lambdas;
  for (int i : active) lambdas.push_back(spec.lambdas[static_cast<std::size_t>(i)]);
  return gram(lambdas, T);
}

void refuse_if_ill_conditioned(double condition, double cap) {
  if (!(condition <= cap)) {
    std::ostringstream os;
    os.precision(3);
    os << "Gram condition " << condition << " exceeds the cap " << cap
       << "; increase T or decrease the number of controlled modes";
    throw Error(ErrorKind::kConditioning, os.str());
  }
}

double exponential_norm(const ExponentialSum& f, double T) {
  if (f.frequencies.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < f.frequencies.size(); ++m) {
    for (std::size_t k = 0; k < f.frequencies.size(); ++k) {
      acc += (std::conj(f.amplitudes[m]) * f.amplitudes[k] *
              phase_integral(f.frequencies[k] - f.frequencies[m], T))
                 .real();
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

void check_inputs(const ModalState& state0, const SpectralData& spec, double sigma_l, double T) {
  if (state0.basis_ref != spec.fingerprint) throw Error(ErrorKind::kArgument, "control: foreign modal state");
  if (!(sigma_l > 0.0)) throw Error(ErrorKind::kArgument, "control: sigma(l) must be positive");
  if (!(T > 0.0)) throw Error(ErrorKind::kArgument, "control: horizon must be positive");
  if (state0.coefficients.empty()) throw Error(ErrorKind::kArgument, "control: empty initial state");
  if (state0.coefficients.size() > static_cast<std::size_t>(spec.trusted_count)) {
    throw Error(ErrorKind::kArgument, "control: more modes than trusted_count");
  }
}

}  // namespace

NullMoments moments_for_null(const ModalState& state0, const SpectralData& spec, double sigma_l,
                             double trace_floor) {
  if (state0.basis_ref != spec.fingerprint) throw Error(ErrorKind::kArgument, "moments: foreign modal state");
  if (!(sigma_l > 0.0)) throw Error(ErrorKind::kArgument, "moments: sigma(l) must be positive");
  NullMoments out;
  out.moments.resize(state0.coefficients.size());
  for (std::size_t n = 0; n < state0.coefficients.size(); ++n) {
    const double t = spec.traces[n];
    if (!(std::abs(t) >= trace_floor)) {
      out.excluded.push_back(static_cast<int>(n) + 1);
      out.moments[n] = Complex{};
      continue;
    }
    out.moments[n] = kI * state0.coefficients[n] / (sigma_l * t);
  }
  return out;
}

MomentSolve solve_moment_problem(const std::vector<Complex>& moments, const SpectralData& spec, double T,
                                 double gram_cap, const std::vector<int>& excluded) {
  if (moments.empty()) throw Error(ErrorKind::kArgument, "moment problem: no moments");
  if (moments.size() > spec.size()) throw Error(ErrorKind::kArgument, "moment problem: more moments than modes");
  const auto active = active_modes(moments.size(), excluded);
  MomentSolve out;
  if (active.empty()) return out;
  const GramSystem g = active_gram(spec, active, T);
  refuse_if_ill_conditioned(g.condition, gram_cap);
  const auto n = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXcd m(n);
  for (Eigen::Index i = 0; i < n; ++i) m(i) = moments[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])];
  // Row n of G beta = m reads sum_k beta_k int e^{i (lambda_k - lambda_n) t} = m_n.
  const Eigen::VectorXcd beta = g.G.ldlt().solve(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.control.frequencies.push_back(g.lambdas[static_cast<std::size_t>(i)]);
    out.control.amplitudes.push_back(beta(i));
  }
  out.gram_condition = g.condition;
  out.control_norm = std::sqrt(std::max(0.0, (beta.adjoint() * g.G * beta)(0, 0).real()));
  return out;
}

double verify_null(const ModalState& state0, const SpectralData& spec, double sigma_l, const ControlSignal& f,
                   double T) {
  const double initial = sobolev_norm(state0, spec, -0.5);
  if (initial == 0.0) {
    return sobolev_norm(evolve_controlled(state0, spec, sigma_l, f, T), spec, -0.5);
  }
  const ModalState final_state = evolve_controlled(state0, spec, sigma_l, f, T);
  return sobolev_norm(final_state, spec, -0.5) / initial;
}

ControlSolution synthesize_moment_control(const ModalState& state0, const SpectralData& spec, double sigma_l,
                                          double T, const ControlOptions& options) {
  check_inputs(state0, spec, sigma_l, T);
  const NullMoments nm = moments_for_null(state0, spec, sigma_l, options.trace_floor);
  const MomentSolve ms = solve_moment_problem(nm.moments, spec, T, options.gram_cap, nm.excluded);
  ControlSolution sol;
  sol.T = T;
  sol.N = static_cast<int>(state0.coefficients.size());
  sol.method = "moment";
  sol.moments = nm.moments;
  sol.excluded = nm.excluded;
  sol.control = ms.control;
  sol.control_norm = ms.control_norm;
  sol.gram_condition = ms.gram_condition;
  sol.residual_final = verify_null(state0, spec, sigma_l, sol.control, T);
  return sol;
}

Eigen::MatrixXcd hum_operator(const SpectralData& spec, double T, int N, double sigma_l) {
  if (N < 1 || static_cast<std::size_t>(N) > spec.size()) throw Error(ErrorKind::kArgument, "hum_operator: bad N");
  if (!(sigma_l > 0.0)) throw Error(ErrorKind::kArgument, "hum_operator: sigma(l) must be positive");
  const auto n = static_cast<std::size_t>(N);
  const GramSystem g = gram(std::span<const double>(spec.lambdas.data(), n), T,
                            std::span<const double>(spec.traces.data(), n));
  return sigma_l * (*g.weighted);
}

namespace {

struct CgResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

CgResult conjugate_gradient(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b, int max_iterations, double tol) {
  CgResult out;
  out.x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXcd r = b;
  Eigen::VectorXcd p = r;
  double rr = r.squaredNorm();
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXcd ap = a * p;
    const Complex pap = p.dot(ap);  // p^H A p
    if (!(pap.real() > 0.0)) break;
    const double alpha = rr / pap.real();
    out.x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    out.iterations = it;
    // Recompute the true residual before declaring convergence.
    if (std::sqrt(rr_new) <= tol * bnorm) {
      out.relative_residual = (b - a * out.x).norm() / bnorm;
      if (out.relative_residual <= tol) {
        out.converged = true;
        return out;
      }
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  out.relative_residual = (b - a * out.x).norm() / bnorm;
  out.converged = out.relative_residual <= tol;
  return out;
}

}  // namespace

ControlSolution synthesize_hum_control(const ModalState& state0, const SpectralData& spec, double sigma_l,
                                       double T, const ControlOptions& options) {
  check_inputs(state0, spec, sigma_l, T);
  const NullMoments nm = moments_for_null(state0, spec, sigma_l, options.trace_floor);
  const auto active = active_modes(state0.coefficients.size(), nm.excluded);
  ControlSolution sol;
  sol.T = T;
  sol.N = static_cast<int>(state0.coefficients.size());
  sol.method = "hum";
  sol.moments = nm.moments;
  sol.excluded = nm.excluded;
  sol.hum_datum.assign(state0.coefficients.size(), Complex{});
  if (!active.empty()) {
    const GramSystem g = active_gram(spec, active, T);
    refuse_if_ill_conditioned(g.condition, options.gram_cap);
    sol.gram_condition = g.condition;
    const auto n = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXcd lambda_op(n, n);
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ai = static_cast<std::size_t>(active[static_cast<std::size_t>(i)]);
      rhs(i) = kI * state0.coefficients[ai];
      for (Eigen::Index k = 0; k < n; ++k) {
        const auto ak = static_cast<std::size_t>(active[static_cast<std::size_t>(k)]);
        lambda_op(i, k) = sigma_l * spec.traces[ai] * spec.traces[ak] * g.G(i, k);
      }
    }
    const CgResult cg = conjugate_gradient(lambda_op, rhs, options.cg_max_iterations, options.cg_tolerance);
    sol.cg_iterations = cg.iterations;
    sol.cg_converged = cg.converged;
    sol.cg_relative_residual = cg.relative_residual;
    const Eigen::VectorXcd c = cg.converged ? cg.x : Eigen::VectorXcd(lambda_op.ldlt().solve(rhs));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ai = static_cast<std::size_t>(active[static_cast<std::size_t>(i)]);
      sol.hum_datum[ai] = c(i);
      sol.control.frequencies.push_back(spec.lambdas[ai]);
      sol.control.amplitudes.push_back(c(i) * spec.traces[ai]);
    }
  }
  sol.control_norm = exponential_norm(sol.control, T);
  sol.residual_final = verify_null(state0, spec, sigma_l, sol.control, T);
  return sol;
}

double relative_l2_difference(const ExponentialSum& f, const ExponentialSum& g, double T) {
  ExponentialSum diff = f;
  // Shared frequencies are subtracted coefficient-wise so the quadratic form
  // never has to cancel two nearly equal norms.
  for (std::size_t k = 0; k < g.frequencies.size(); ++k) {
    const auto it = std::find(diff.frequencies.begin(), diff.frequencies.end(), g.frequencies[k]);
    if (it != diff.frequencies.end()) {
      diff.amplitudes[static_cast<std::size_t>(it - diff.frequencies.begin())] -= g.amplitudes[k];
    } else {
      diff.frequencies.push_back(g.frequencies[k]);
      diff.amplitudes.push_back(-g.amplitudes[k]);
    }
  }
  const double base = exponential_norm(f, T);
  const double d = exponential_norm(diff, T);
  return base > 0.0 ? d / base : d;
}

}  // namespace biharm
