#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "biharm/operator.hpp"

namespace biharm {

// Lowest eigenpairs of K phi = lambda M phi, ascending, M-orthonormal, with
// the sign of every mode fixed so that its boundary trace phi''(l) is positive.
struct SpectralData {
  std::vector<double> lambdas;
  std::vector<double> mus;        // lambda^{1/4}
  std::vector<double> traces;     // phi_n''(l) > 0
  std::vector<double> residuals;  // normwise backward error of each pair
  std::vector<std::vector<double>> modes;
  int trusted_count = 0;
  std::shared_ptr<const DiscreteOperator> op;
  std::uint64_t fingerprint = 0;

  std::size_t size() const noexcept { return lambdas.size(); }
};

inline constexpr double kResidualTolerance = 1e-8;

SpectralData solve_spectrum(const DiscreteOperator& op, int count);

struct ValidationOptions {
  double gap_tolerance = 1e-8;     // minimum relative gap declaring two eigenvalues distinct
  double trace_floor = 1e-6;       // minimum |phi_n''(l)|
  double orthonormality_tolerance = 1e-10;
};

struct ModeCheck {
  int n = 0;  // 1-based
  bool positive = false;
  double relative_gap = 0.0;  // to the nearer neighbour
  double trace_abs = 0.0;
  double orthonormality = 0.0;  // max_m |<phi_m, phi_n>_M - delta_mn|
};

struct ValidationFailure {
  int n = 0;
  std::string kind;  // "positivity", "simplicity", "trace", "orthonormality"
  std::string detail;
};

struct ValidationReport {
  std::vector<ModeCheck> modes;
  std::vector<ValidationFailure> failures;
  bool pass = false;
};

// Checks modes 1..trusted_count. Never throws for a failed check; the
// report carries every violation.
ValidationReport validate_spectrum(const SpectralData& spec, const ValidationOptions& options = {});

// Hash of (E, lambdas); ties modal states to the spectrum they were built on.
std::uint64_t spectrum_fingerprint(int elements, const std::vector<double>& lambdas);

}  // namespace biharm
