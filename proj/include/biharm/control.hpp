#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biharm/dynamics.hpp"
#include "biharm/observability.hpp"

namespace biharm {

struct ControlOptions {
  double gram_cap = 1e12;     // refuse Gram systems with a larger condition number
  double trace_floor = 1e-6;  // modes with |t_n| below this cannot be steered
  int cg_max_iterations = 1000;
  double cg_tolerance = 1e-12;
};

struct NullMoments {
  std::vector<Complex> moments;  // m_n = i a_n(0) / (sigma_l t_n); zero for excluded modes
  std::vector<int> excluded;     // 1-based indices with |t_n| below the floor
};

NullMoments moments_for_null(const ModalState& state0, const SpectralData& spec, double sigma_l,
                             double trace_floor = ControlOptions{}.trace_floor);

struct MomentSolve {
  ExponentialSum control;  // frequencies lambda_k, amplitudes beta_k
  double gram_condition = 0.0;
  double control_norm = 0.0;  // sqrt(beta^H G beta)
};

// Minimum-L2-norm f in span{e^{i lambda_k t}} with int_0^T e^{-i lambda_n t} f = m_n
// for the first moments.size() modes. Throws Error(kConditioning) above the cap.
MomentSolve solve_moment_problem(const std::vector<Complex>& moments, const SpectralData& spec, double T,
                                 double gram_cap = ControlOptions{}.gram_cap,
                                 const std::vector<int>& excluded = {});

struct ControlSolution {
  double T = 0.0;
  int N = 0;
  std::string method;  // "moment" or "hum"
  std::vector<Complex> moments;
  ExponentialSum control;
  double control_norm = 0.0;
  double residual_final = 0.0;  // ||a(T)||_{-1/2} / ||a(0)||_{-1/2}, from an independent forward solve
  double gram_condition = 0.0;
  std::vector<int> excluded;
  // HUM only.
  std::vector<Complex> hum_datum;
  int cg_iterations = 0;
  bool cg_converged = false;
  double cg_relative_residual = 0.0;
};

ControlSolution synthesize_moment_control(const ModalState& state0, const SpectralData& spec, double sigma_l,
                                          double T, const ControlOptions& options = {});

// Lambda_N[n][k] = sigma_l t_n t_k G[n][k]: the quadratic form
// c -> sigma_l int_0^T |sum c_k e^{i lambda_k t} t_k|^2 dt in modal coordinates.
Eigen::MatrixXcd hum_operator(const SpectralData& spec, double T, int N, double sigma_l);

// Solves Lambda c = i a(0) by conjugate gradients (direct LDLT if CG stalls)
// and steers with f(t) = sum_k c_k t_k e^{i lambda_k t}.
ControlSolution synthesize_hum_control(const ModalState& state0, const SpectralData& spec, double sigma_l,
                                       double T, const ControlOptions& options = {});

// ||f - g||_{L2(0,T)} / ||f||_{L2(0,T)} for two exponential sums on the same frequencies.
double relative_l2_difference(const ExponentialSum& f, const ExponentialSum& g, double T);

// Residual of the independent forward solve.
double verify_null(const ModalState& state0, const SpectralData& spec, double sigma_l, const ControlSignal& f,
                   double T);

}  // namespace biharm
