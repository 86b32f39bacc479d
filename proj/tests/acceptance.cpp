#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "biharm/asymptotics.hpp"
#include "biharm/control.hpp"
#include "biharm/observability.hpp"
#include "fixtures.hpp"
#include "golden_schema.hpp"
#include "oracles.hpp"

using namespace biharm;
using fixture::Profile;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* name(Profile p) { return p == Profile::kConstant ? "constant" : "variable"; }

ModalState random_state(const SpectralData& spec, int modes, std::mt19937_64& g) {
  std::vector<Complex> c(static_cast<std::size_t>(modes));
  for (auto& v : c) v = oracle::complex_normal(g);
  return make_state(spec, std::move(c));
}

// 1. Computed mu_n against bisection roots of cos(mu) cosh(mu) = 1.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto op = assemble(fixture::profile(Profile::kConstant), 512);
  const auto spec = solve_spectrum(op, 8);
  const double elapsed = seconds_since(t0);
  const auto roots = oracle::clamped_roots(8);
  const double literal[] = {4.7300407449, 7.8532046241, 10.9956078380};
  double worst = 0.0, literal_worst = 0.0;
  for (int n = 0; n < 8; ++n) worst = std::max(worst, std::abs(spec.mus[n] - roots[n]) / roots[n]);
  for (int n = 0; n < 3; ++n) literal_worst = std::max(literal_worst, std::abs(roots[n] - literal[n]));
  return {worst <= 1e-6 && literal_worst <= 1e-10 && elapsed <= 30.0,
          fmt("max rel err %.3g (<= 1e-6), oracle vs quoted roots %.3g, runtime %.3f s (<= 30 s)", worst,
              literal_worst, elapsed)};
}

// 2. (mu_{n+1} - mu_n) gamma / pi for 15 <= n <= 24 at E = 2048.
Outcome criterion2() {
  bool pass = true;
  std::string detail;
  for (auto [p, tol] : {std::pair{Profile::kConstant, 1e-3}, std::pair{Profile::kVariable, 1e-2}}) {
    const auto& spec = fixture::spectrum(p, 2048, 30);
    const auto geo = geometry(fixture::profile(p));
    double lo = INFINITY, hi = -INFINITY;
    for (int n = 15; n <= 24; ++n) {
      const double v = (spec.mus[n] - spec.mus[n - 1]) * geo.gamma() / std::numbers::pi;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    pass = pass && lo >= 1 - tol && hi <= 1 + tol;
    detail += fmt("%s [%.6f, %.6f] within [%g, %g]; ", name(p), lo, hi, 1 - tol, 1 + tol);
  }
  return {pass, detail};
}

// 3. (lambda_{n+1} - lambda_n) / (4 (n + 1/2)^3 (pi / gamma)^4), plus a bounded-ratio check.
Outcome criterion3() {
  bool pass = true;
  std::string detail;
  constexpr double kRatioLow = 0.5, kRatioHigh = 2.0;
  for (auto p : {Profile::kConstant, Profile::kVariable}) {
    const auto& spec = fixture::spectrum(p, 2048, 30);
    const double scale = std::pow(std::numbers::pi / geometry(fixture::profile(p)).gamma(), 4);
    auto normalized = [&](int n) {
      return (spec.lambdas[n] - spec.lambdas[n - 1]) / (4 * std::pow(n + 0.5, 3) * scale);
    };
    double lo = INFINITY, hi = -INFINITY;
    int worst_n = 0;
    for (int n = 15; n <= 24; ++n) {
      const double v = normalized(n);
      if (v > hi) worst_n = n;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double rlo = INFINITY, rhi = -INFINITY;
    for (int n = 2; n < spec.trusted_count; ++n) {
      rlo = std::min(rlo, normalized(n));
      rhi = std::max(rhi, normalized(n));
    }
    pass = pass && lo >= 0.9 && hi <= 1.1 && rlo >= kRatioLow && rhi <= kRatioHigh;
    detail += fmt("%s n=15..24 [%.6f, %.6f] (max at n=%d) within [0.9, 1.1], ratio over n=2..%d [%.4f, %.4f]; ",
                  name(p), lo, hi, worst_n, spec.trusted_count - 1, rlo, rhi);
  }
  return {pass, detail};
}

// 4. |t_n| / sqrt(lambda_n) against 2 zeta(l) sqrt(rho(l) / sigma(l)) / gamma.
Outcome criterion4() {
  bool pass = true;
  std::string detail;
  for (auto p : {Profile::kConstant, Profile::kVariable}) {
    const auto& spec = fixture::spectrum(p, 2048, 30);
    const auto prof = fixture::profile(p);
    const auto geo = geometry(prof);
    const double l = prof.length();
    const double limit = 2 * geo.zeta(l) * std::sqrt(prof.rho(l) / prof.sigma(l)) / geo.gamma();
    double worst = 0.0;
    for (int n = 10; n <= 15; ++n)
      worst = std::max(worst, std::abs(std::abs(spec.traces[n - 1]) / std::sqrt(spec.lambdas[n - 1]) / limit - 1));
    pass = pass && worst <= 0.04;
    detail += fmt("%s max |ratio - 1| %.4f (<= 0.04); ", name(p), worst);
  }
  return {pass, detail};
}

// 5. Simplicity and nonvanishing traces up to the trusted count.
Outcome criterion5() {
  bool pass = true;
  std::string detail;
  for (auto p : {Profile::kConstant, Profile::kVariable}) {
    const auto& spec = fixture::spectrum(p, 2048, 30);
    const auto report = validate_spectrum(spec);
    double min_gap = INFINITY, min_trace = INFINITY;
    for (const auto& m : report.modes) {
      if (m.n > spec.trusted_count) continue;
      min_gap = std::min(min_gap, m.relative_gap);
      min_trace = std::min(min_trace, m.trace_abs);
    }
    pass = pass && report.pass && min_gap > 1e-8 && min_trace > ValidationOptions{}.trace_floor;
    detail += fmt("%s %s, min rel gap %.3g, min |t_n| %.3g, n <= %d; ", name(p), report.pass ? "valid" : "invalid",
                  min_gap, min_trace, spec.trusted_count);
  }
  return {pass, detail};
}

// 6. Free evolution conserves every spectral Sobolev norm.
Outcome criterion6() {
  const auto& spec = fixture::spectrum(Profile::kVariable, 256, 20);
  auto g = oracle::rng(601);
  std::uniform_real_distribution<double> when(0.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(spec, 20, g);
    const auto y = evolve_free(s, spec, when(g));
    for (double theta : {-0.5, 0.0, 0.5}) {
      const double a = sobolev_norm(s, spec, theta);
      worst = std::max(worst, std::abs(sobolev_norm(y, spec, theta) - a) / a);
    }
  }
  return {worst <= 1e-12, fmt("max relative drift %.3g (<= 1e-12)", worst)};
}

// 7. Observability constants bracket sampled quotients and grow with T.
Outcome criterion7() {
  const auto& spec = fixture::spectrum(Profile::kConstant, 256, 20);
  auto g = oracle::rng(701);
  bool pass = true;
  std::string detail;
  double previous = 0.0;
  for (double T : {0.1, 1.0}) {
    const auto r = observability_constants(spec, T, 12);
    double qlo = INFINITY, qhi = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double q = observability_quotient(random_state(spec, 12, g), spec, T);
      qlo = std::min(qlo, q);
      qhi = std::max(qhi, q);
    }
    pass = pass && r.c_T > 0 && qlo >= r.c_T * (1 - 1e-8) && qhi <= r.C_T * (1 + 1e-8) && r.c_T >= previous;
    previous = r.c_T;
    detail += fmt("T=%g c_T %.6g C_T %.6g sampled [%.6g, %.6g]; ", T, r.c_T, r.C_T, qlo, qhi);
  }
  return {pass, detail + "c_T nondecreasing"};
}

// 8. Window-count density of 200 oracle eigenvalues.
Outcome criterion8() {
  std::vector<double> values;
  for (double mu : oracle::clamped_roots(200)) values.push_back(std::pow(mu, 4));
  const auto est = beurling_density(values, default_density_windows(values));
  bool decreasing = true;
  for (std::size_t i = 1; i < est.estimates.size(); ++i) decreasing = decreasing && est.estimates[i] < est.estimates[i - 1];
  return {est.estimates.back() <= 0.05 && decreasing,
          fmt("estimate %.4g at window %.4g (<= 0.05), %s over %zu windows", est.estimates.back(), est.windows.back(),
              decreasing ? "decreasing" : "not decreasing", est.windows.size())};
}

// 9. Null control by both routes, forward verified.
Outcome criterion9() {
  const auto& spec = fixture::spectrum(Profile::kConstant, 256, 20);
  const double sl = fixture::sigma_at_end(spec), T = 0.5;
  std::vector<ModalState> data;
  std::vector<Complex> two(12);
  two[0] = two[1] = 1.0;
  data.push_back(make_state(spec, two));
  auto g = oracle::rng(901);
  for (int i = 0; i < 10; ++i) data.push_back(random_state(spec, 12, g));
  double residual = 0.0, difference = 0.0, slowest = 0.0;
  for (const auto& s : data) {
    auto t0 = std::chrono::steady_clock::now();
    const auto hum = synthesize_hum_control(s, spec, sl, T);
    slowest = std::max(slowest, seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    const auto mom = synthesize_moment_control(s, spec, sl, T);
    slowest = std::max(slowest, seconds_since(t0));
    residual = std::max({residual, hum.residual_final, mom.residual_final});
    difference = std::max(difference, relative_l2_difference(mom.control, hum.control, T));
  }
  return {residual <= 1e-8 && difference <= 1e-8 && slowest <= 10.0,
          fmt("max residual %.3g (<= 1e-8), max L2 difference %.3g (<= 1e-8), slowest synthesis %.3f s (<= 10 s)",
              residual, difference, slowest)};
}

// 10. sup_t ||y(t)||_{H^-2} / (||y0||_{H^-2} + ||f||_{L2}) against C = max(1, sigma(l) sqrt(T sum t_n^2 / lambda_n)),
// which bounds it by Cauchy-Schwarz on each Duhamel integral.
Outcome criterion10() {
  const auto& spec = fixture::spectrum(Profile::kVariable, 256, 20);
  const double sl = fixture::sigma_at_end(spec), T = 0.5;
  constexpr int N = 12;
  double weight = 0.0;
  for (int n = 0; n < N; ++n) weight += spec.traces[n] * spec.traces[n] / spec.lambdas[n];
  const double bound = std::max(1.0, sl * std::sqrt(T * weight));
  auto g = oracle::rng(1001);
  std::uniform_real_distribution<double> freq(-2e4, 2e4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(spec, N, g);
    ExponentialSum f;
    for (int k = 0; k < 3; ++k) {
      f.frequencies.push_back(freq(g));
      f.amplitudes.push_back(oracle::complex_normal(g) * std::sqrt(spec.lambdas[N - 1]));
    }
    double f2 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        f2 += (std::conj(f.amplitudes[a]) * f.amplitudes[b] * phase_integral(f.frequencies[b] - f.frequencies[a], T))
                  .real();
    double sup = sobolev_norm(s, spec, -0.5);
    for (int k = 1; k <= 40; ++k) sup = std::max(sup, sobolev_norm(evolve_controlled(s, spec, sl, f, T * k / 40), spec, -0.5));
    worst = std::max(worst, sup / (sobolev_norm(s, spec, -0.5) + std::sqrt(f2)));
  }
  return {worst <= bound, fmt("max quotient %.6g, configuration constant %.6g", worst, bound)};
}

// 11. Two CLI runs per example configuration are byte identical and match the golden schemas.
Outcome criterion11(const fs::path& cli, const fs::path& configs, const fs::path& golden_dir) {
  const fs::path root = fs::temp_directory_path() / ("biharm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  int files = 0;
  std::string problem;
  for (const char* cfg : {"spectrum_constant", "asymptotics_variable", "observability_constant", "control_constant",
                          "simulate_variable"}) {
    const std::string kind = std::string(cfg).substr(0, std::string(cfg).find('_'));
    std::vector<fs::path> dirs;
    for (const char* run : {"a", "b"}) {
      const fs::path out = root / cfg / run;
      const std::string cmd = "\"" + cli.string() + "\" " + kind + " --config \"" + (configs / (std::string(cfg) + ".cfg")).string() +
                              "\" --out \"" + out.string() + "\" --quiet";
      if (std::system(cmd.c_str()) != 0) problem += std::string(cfg) + ": run failed; ";
      dirs.push_back(out);
    }
    std::vector<std::string> names;
    if (fs::is_directory(dirs[0]))
      for (const auto& e : fs::directory_iterator(dirs[0])) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) problem += std::string(cfg) + ": no output; ";
    for (const auto& n : names) {
      ++files;
      if (golden::slurp(dirs[0] / n) != golden::slurp(dirs[1] / n)) problem += n + " differs between runs; ";
      const auto issue = golden::check_file(golden_dir, dirs[0] / n);
      if (!issue.empty()) problem += issue + "; ";
    }
  }
  fs::remove_all(root);
  return {problem.empty(), problem.empty() ? fmt("%d files byte identical across runs and schema conformant", files)
                                           : problem};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <biharm cli> <configs dir> <golden dir>\n", argv[0]);
    return 2;
  }
  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10,
      [&] { return criterion11(argv[1], argv[2], argv[3]); },
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
