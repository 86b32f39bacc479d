#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "biharm/spectrum.hpp"

namespace biharm {

using Complex = std::complex<double>;

// Modal coefficients a_n(t) of a solution y(t, x) = sum a_n(t) phi_n(x).
struct ModalState {
  std::vector<Complex> coefficients;
  double time = 0.0;
  std::uint64_t basis_ref = 0;  // SpectralData::fingerprint
};

// Wraps coefficients for `spec`; throws if there are more than trusted_count.
ModalState make_state(const SpectralData& spec, std::vector<Complex> coefficients, double time = 0.0);

struct Projection {
  ModalState state;
  double reconstruction_residual = 0.0;  // ||y0 - sum c_n phi_n||_rho / ||y0||_rho
};

// c_n = int y0 phi_n rho dx on the element quadrature, for the first `modes` modes.
Projection project_initial(const SpectralData& spec, const std::function<Complex(double)>& y0, int modes);

// Same from a sample table (x strictly increasing, covering [0, l]); values
// are interpolated by local cubics. Needs at least two samples per element,
// otherwise throws Error(kResampling) naming the required count.
Projection project_samples(const SpectralData& spec, const std::vector<double>& x,
                           const std::vector<Complex>& values, int modes);

// Exact free evolution: a_n <- a_n e^{i lambda_n t}.
ModalState evolve_free(const ModalState& state, const SpectralData& spec, double t);

// sqrt(sum lambda_n^{2 theta} |a_n|^2). theta = 1/2 is the H^2_0 norm, theta = -1/2 its dual.
double sobolev_norm(const ModalState& state, const SpectralData& spec, double theta);

// f(t) = sum_k amplitudes[k] e^{i frequencies[k] t}.
struct ExponentialSum {
  std::vector<double> frequencies;
  std::vector<Complex> amplitudes;

  Complex operator()(double t) const;
};

// f sampled on the uniform grid t_j = j * duration / (samples.size() - 1);
// the sample count must be odd (Filon-Simpson panels come in pairs).
struct TabulatedSignal {
  double duration = 0.0;
  std::vector<Complex> samples;
};

using ControlSignal = std::variant<ExponentialSum, TabulatedSignal>;

// int_0^T e^{i delta s} ds, evaluated as T e^{i delta T / 2} sinc(delta T / 2).
Complex phase_integral(double delta, double T);

// int_0^T e^{-i lambda s} f(s) ds: closed form for exponential sums,
// Filon-Simpson for tabulated signals.
Complex oscillatory_moment(const ControlSignal& f, double lambda, double T);

inline constexpr int kSamplesPerPeriod = 20;

// Minimum odd sample count a tabulated signal on [0, T] needs for the
// fastest frequency lambda_max.
std::size_t required_samples(double lambda_max, double T);

// a_n(T) = e^{i lambda_n T} (a_n(0) + i sigma_l t_n int_0^T e^{-i lambda_n s} f(s) ds),
// the modal form of the boundary-controlled equation with y_x(t, l) = f(t).
ModalState evolve_controlled(const ModalState& state0, const SpectralData& spec, double sigma_l,
                             const ControlSignal& f, double T);

}  // namespace biharm
