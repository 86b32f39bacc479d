#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biharm/coeffs.hpp"
#include "biharm/error.hpp"

namespace biharm::cli {

enum class ExperimentKind { kSpectrum, kAsymptotics, kObservability, kControl, kSimulate };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view text);

enum class ControlMethod { kHum, kMoment };

// Initial datum: explicit modal coefficients or a real polynomial y0(x).
struct InitialSpec {
  std::vector<std::pair<int, std::complex<double>>> modes;  // (1-based n, c_n)
  std::vector<double> poly;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSpectrum;
  int elements = 0;
  int modes = 0;
  std::vector<double> horizons;
  int quadrature_order = 4;
  std::string output = ".";
  bool dump_matrices = false;
  ProfileSpec profile;
  std::optional<InitialSpec> initial;
  ControlMethod method = ControlMethod::kHum;
  int waveform_samples = 1025;
  double gram_cap = 1e12;
  std::vector<double> times;
};

struct ConfigIssue {
  int line = 0;  // 0 when the problem is a missing section or key
  std::string message;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);

  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Flat sections of `key = value` lines; '#' starts a comment. A value with
// unbalanced brackets continues on the following lines. Throws ConfigError
// listing every problem found, not just the first.
ExperimentConfig parse_config(std::string_view text);

}  // namespace biharm::cli
