#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>

#include "biharm/asymptotics.hpp"
#include "biharm/coeffs.hpp"
#include "biharm/operator.hpp"
#include "biharm/spectrum.hpp"

namespace fixture {

inline biharm::ProfileSpec constant_spec(double length = 1.0, double rho = 1.0, double sigma = 1.0) {
  biharm::ProfileSpec s;
  s.length = length;
  s.rho = biharm::CoefficientSpec::constant(rho);
  s.sigma = biharm::CoefficientSpec::constant(sigma);
  return s;
}

// rho = 1 + x, sigma = 1 + x/2, q = x (1 - x) on [0, 1].
inline biharm::ProfileSpec variable_spec() {
  biharm::ProfileSpec s;
  s.rho = biharm::CoefficientSpec::polynomial({1.0, 1.0});
  s.sigma = biharm::CoefficientSpec::polynomial({1.0, 0.5});
  s.q = biharm::CoefficientSpec::polynomial({0.0, 1.0, -1.0});
  return s;
}

enum class Profile { kConstant, kVariable };

inline biharm::CoefficientProfile profile(Profile p) {
  return biharm::build_profile(p == Profile::kConstant ? constant_spec() : variable_spec());
}

// Spectra are expensive at E = 2048, so each (profile, E, count) is solved once per process.
inline const biharm::SpectralData& spectrum(Profile p, int elements, int count) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<biharm::SpectralData>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{static_cast<int>(p), elements, count}];
  if (!slot) {
    const auto op = biharm::assemble(profile(p), elements);
    slot = std::make_unique<biharm::SpectralData>(biharm::solve_spectrum(op, count));
  }
  return *slot;
}

inline double sigma_at_end(const biharm::SpectralData& spec) {
  return spec.op->profile().sigma(spec.op->length());
}

}  // namespace fixture
