#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biharm/dynamics.hpp"

namespace biharm {

// Gram matrix of the exponentials e^{i lambda_n t} on (0, T):
//   G[m][n] = int_0^T e^{i (lambda_n - lambda_m) t} dt,
// Hermitian with G[n][n] = T exactly.
struct GramSystem {
  double T = 0.0;
  std::vector<double> lambdas;
  Eigen::MatrixXcd G;
  std::optional<Eigen::MatrixXcd> weighted;  // t_m t_n G[m][n]
  double condition = 0.0;                    // lambda_max(G) / lambda_min(G); inf if not PD
  double min_eigenvalue = 0.0;
};

// Rejects duplicated frequencies (Error kArgument) and T <= 0.
GramSystem gram(std::span<const double> lambdas, double T,
                std::optional<std::span<const double>> traces = std::nullopt);

// sum_n a_n e^{i lambda_n t} phi_n''(l).
Complex boundary_output(const ModalState& state, const SpectralData& spec, double t);

struct ObservabilityReport {
  double T = 0.0;
  int N = 0;
  double c_T = 0.0;  // min over data of int_0^T |y_xx(t, l)|^2 / ||y0||^2_{H^2_0}
  double C_T = 0.0;  // max of the same quotient
  double condition = 0.0;
  double density = 0.0;  // window-count estimate over the trusted eigenvalues
  bool resolution_failure = false;  // c_T <= 0: Gram numerically singular
};

// Extreme eigenvalues of D^{-1/2} diag(t) G diag(t) D^{-1/2}, D = diag(lambda_n),
// over the first N modes.
ObservabilityReport observability_constants(const SpectralData& spec, double T, int N);

// The quotient the constants bound, for one datum (first N = size modes).
double observability_quotient(const ModalState& state, const SpectralData& spec, double T);

struct DensityEstimate {
  std::vector<double> windows;
  std::vector<double> estimates;  // max_a #{lambda in [a, a + r)} / r
  bool nonincreasing = false;
};

// Upper-density estimate of an ascending sequence for each window length.
DensityEstimate beurling_density(std::span<const double> values, std::span<const double> windows);

// r_k = values.back() * 10^{-k}, k = 6 .. 1, ascending.
std::vector<double> default_density_windows(std::span<const double> values);

}  // namespace biharm
