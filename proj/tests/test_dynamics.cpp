#include <doctest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <random>

#include "biharm/dynamics.hpp"
#include "biharm/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace biharm;
using fixture::Profile;

namespace {

constexpr Complex kI{0.0, 1.0};

const SpectralData& small_spectrum() { return fixture::spectrum(Profile::kVariable, 128, 12); }

ModalState random_state(const SpectralData& spec, int modes, std::mt19937_64& g) {
  std::vector<Complex> c(static_cast<std::size_t>(modes));
  for (auto& v : c) v = oracle::complex_normal(g);
  return make_state(spec, std::move(c));
}

ExponentialSum random_sum(std::mt19937_64& g, int terms, double max_frequency) {
  std::uniform_real_distribution<double> freq(-max_frequency, max_frequency);
  ExponentialSum f;
  for (int k = 0; k < terms; ++k) {
    f.frequencies.push_back(freq(g));
    f.amplitudes.push_back(oracle::complex_normal(g));
  }
  return f;
}

// Integrates a' = i lambda a + i sigma t f(t) with an adaptive Dormand-Prince
// scheme on the real/imaginary split.
std::vector<Complex> ode_oracle(const SpectralData& spec, const ModalState& s0, double sigma_l,
                                const std::function<Complex(double)>& f, double T) {
  namespace ode = boost::numeric::odeint;
  const std::size_t n = s0.coefficients.size();
  std::vector<double> y(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    y[2 * k] = s0.coefficients[k].real();
    y[2 * k + 1] = s0.coefficients[k].imag();
  }
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& dx, double t) {
    const Complex ft = f(t);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a{x[2 * k], x[2 * k + 1]};
      const Complex d = kI * spec.lambdas[k] * a + kI * sigma_l * spec.traces[k] * ft;
      dx[2 * k] = d.real();
      dx[2 * k + 1] = d.imag();
    }
  };
  ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<std::vector<double>>()), rhs,
                          y, 0.0, T, 1e-7);
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = {y[2 * k], y[2 * k + 1]};
  return out;
}

double relative_difference(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("states are tied to their spectrum and its trusted count") {
    const auto& spec = small_spectrum();
    CHECK_THROWS_AS(make_state(spec, std::vector<Complex>(13)), Error);
    const auto s = make_state(spec, {1.0});
    CHECK(s.basis_ref == spec.fingerprint);
    const auto& other = fixture::spectrum(Profile::kConstant, 128, 12);
    CHECK_THROWS_AS(evolve_free(s, other, 1.0), Error);
  }

  TEST_CASE("projecting a computed mode recovers a unit coefficient") {
    const auto& spec = small_spectrum();
    const auto& op = *spec.op;
    const auto p = project_initial(spec, [&](double x) { return Complex{op.evaluate(spec.modes[2], x), 0.0}; }, 12);
    for (int n = 0; n < 12; ++n) {
      CHECK(std::abs(p.state.coefficients[n] - (n == 2 ? 1.0 : 0.0)) <= 1e-10);
    }
    CHECK(p.reconstruction_residual <= 1e-10);
  }

  TEST_CASE("projection is linear: 2 phi_1 + i phi_2") {
    const auto& spec = small_spectrum();
    const auto& op = *spec.op;
    const auto p = project_initial(
        spec, [&](double x) { return 2.0 * op.evaluate(spec.modes[0], x) + kI * op.evaluate(spec.modes[1], x); }, 12);
    CHECK(std::abs(p.state.coefficients[0] - 2.0) <= 1e-10);
    CHECK(std::abs(p.state.coefficients[1] - kI) <= 1e-10);
    for (int n = 2; n < 12; ++n) CHECK(std::abs(p.state.coefficients[n]) <= 1e-10);
  }

  TEST_CASE("projection of x^2(1-x)^2 agrees with an independent quadrature") {
    const auto& spec = small_spectrum();
    const auto& op = *spec.op;
    const auto& prof = op.profile();
    auto y0 = [](double x) { return x * x * (1 - x) * (1 - x); };
    const auto p = project_initial(spec, [&](double x) { return Complex{y0(x), 0.0}; }, 12);
    const double h = op.h();
    for (int n = 0; n < 12; ++n) {
      double c = 0.0;
      for (int e = 0; e < op.elements(); ++e) {
        c += oracle::simpson([&](double x) { return y0(x) * op.evaluate(spec.modes[n], x) * prof.rho(x); }, e * h,
                             (e + 1) * h, 16);
      }
      CHECK(std::abs(p.state.coefficients[n].real() - c) <= 1e-10);
      CHECK(p.state.coefficients[n].imag() == 0.0);
    }
  }

  TEST_CASE("sampled projection refuses grids coarser than two samples per element") {
    const auto& spec = small_spectrum();
    const int E = spec.op->elements();
    auto grid = [](int n) {
      std::vector<double> x(static_cast<std::size_t>(n));
      std::vector<Complex> v(x.size());
      for (int i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i) / (n - 1);
        v[i] = x[i] * x[i] * (1 - x[i]) * (1 - x[i]);
      }
      return std::pair{x, v};
    };
    auto [xc, vc] = grid(2 * E);
    try {
      project_samples(spec, xc, vc, 12);
      FAIL("expected a resampling error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kResampling);
      CHECK(std::string(e.what()).find(std::to_string(2 * E + 1)) != std::string::npos);
    }
    auto [xf, vf] = grid(8 * E + 1);
    const auto sampled = project_samples(spec, xf, vf, 12);
    const auto direct =
        project_initial(spec, [](double x) { return Complex{x * x * (1 - x) * (1 - x), 0.0}; }, 12);
    CHECK(relative_difference(sampled.state.coefficients, direct.state.coefficients) <= 1e-8);
    xf.back() = 0.9;
    CHECK_THROWS_AS(project_samples(spec, xf, vf, 12), Error);
  }

  TEST_CASE("free evolution: identity at t = 0, unimodular factors, group property") {
    const auto& spec = small_spectrum();
    auto g = oracle::rng(31);
    const auto s = random_state(spec, 12, g);
    CHECK(evolve_free(s, spec, 0.0).coefficients == s.coefficients);
    std::uniform_real_distribution<double> t(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double t1 = t(g), t2 = t(g);
      const auto a = evolve_free(evolve_free(s, spec, t1), spec, t2), b = evolve_free(s, spec, t1 + t2);
      for (int n = 0; n < 12; ++n) {
        CHECK(std::abs(std::abs(a.coefficients[n]) - std::abs(s.coefficients[n])) <= 1e-14 * std::abs(s.coefficients[n]));
        // Phases lambda t are ~1e6 rad, so agreement is limited by eps * lambda * |t|.
        CHECK(std::abs(a.coefficients[n] - b.coefficients[n]) <=
              4e-16 * spec.lambdas[n] * (std::abs(t1) + std::abs(t2)) * std::abs(s.coefficients[n]) + 1e-14);
      }
      CHECK(b.time == doctest::Approx(t1 + t2));
    }
  }

  TEST_CASE("sobolev norms: one-term sums and the plain coefficient norm") {
    const auto& spec = small_spectrum();
    const auto one = make_state(spec, {1.0});
    for (double theta : {-0.5, 0.0, 0.5, 1.0}) {
      CHECK(sobolev_norm(one, spec, theta) == doctest::Approx(std::pow(spec.lambdas[0], theta)).epsilon(1e-15));
    }
    const auto two = make_state(spec, {Complex{3, 0}, Complex{0, 4}});
    CHECK(sobolev_norm(two, spec, 0.0) == doctest::Approx(5.0).epsilon(1e-15));
  }

  TEST_CASE("free evolution conserves every sobolev norm") {
    const auto& spec = small_spectrum();
    auto g = oracle::rng(32);
    std::uniform_real_distribution<double> t(0.0, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = random_state(spec, 12, g);
      const auto e = evolve_free(s, spec, t(g));
      for (double theta : {-0.5, 0.0, 0.5})
        CHECK(sobolev_norm(e, spec, theta) == doctest::Approx(sobolev_norm(s, spec, theta)).epsilon(1e-12));
    }
  }

  TEST_CASE("zero control reproduces free evolution bit for bit") {
    const auto& spec = small_spectrum();
    auto g = oracle::rng(33);
    const auto s = random_state(spec, 12, g);
    const double sigma_l = fixture::sigma_at_end(spec);
    ExponentialSum zero;
    CHECK(evolve_controlled(s, spec, sigma_l, zero, 0.7).coefficients == evolve_free(s, spec, 0.7).coefficients);
    ExponentialSum zero_amplitudes{{spec.lambdas[0], 5.0}, {Complex{}, Complex{}}};
    CHECK(evolve_controlled(s, spec, sigma_l, zero_amplitudes, 0.7).coefficients ==
          evolve_free(s, spec, 0.7).coefficients);
  }

  TEST_CASE("resonant single-mode forcing grows linearly in T") {
    const auto& spec = small_spectrum();
    const double sigma_l = fixture::sigma_at_end(spec), T = 0.3;
    const Complex a0{0.4, -0.2};
    const auto s = make_state(spec, {a0});
    const ExponentialSum f{{spec.lambdas[0]}, {1.0}};
    const auto out = evolve_controlled(s, spec, sigma_l, f, T);
    const Complex expected = std::polar(1.0, spec.lambdas[0] * T) * (a0 + kI * sigma_l * spec.traces[0] * T);
    CHECK(std::abs(out.coefficients[0] - expected) <= 1e-12 * std::abs(expected));
    const auto ref = ode_oracle(spec, s, sigma_l, [&](double t) { return f(t); }, T);
    CHECK(relative_difference(out.coefficients, ref) <= 1e-8);
  }

  TEST_CASE("controlled solve agrees with the adaptive ODE oracle") {
    const auto& spec = small_spectrum();
    const double sigma_l = fixture::sigma_at_end(spec);
    auto g = oracle::rng(34);
    for (int trial = 0; trial < 5; ++trial) {
      const auto s = random_state(spec, 4, g);
      const auto f = random_sum(g, 3, 2e4);
      const double T = 0.02;
      const auto out = evolve_controlled(s, spec, sigma_l, f, T);
      const auto ref = ode_oracle(spec, s, sigma_l, [&](double t) { return f(t); }, T);
      CHECK(relative_difference(out.coefficients, ref) <= 1e-8);
    }
  }

  TEST_CASE("response is linear in the control") {
    const auto& spec = small_spectrum();
    const double sigma_l = fixture::sigma_at_end(spec), T = 0.4;
    auto g = oracle::rng(35);
    const auto s = random_state(spec, 12, g);
    const auto f1 = random_sum(g, 4, 1e5), f2 = random_sum(g, 4, 1e5);
    ExponentialSum both = f1;
    both.frequencies.insert(both.frequencies.end(), f2.frequencies.begin(), f2.frequencies.end());
    both.amplitudes.insert(both.amplitudes.end(), f2.amplitudes.begin(), f2.amplitudes.end());
    const auto r1 = evolve_controlled(s, spec, sigma_l, f1, T).coefficients;
    const auto r2 = evolve_controlled(s, spec, sigma_l, f2, T).coefficients;
    const auto r12 = evolve_controlled(s, spec, sigma_l, both, T).coefficients;
    const auto free = evolve_free(s, spec, T).coefficients;
    std::vector<Complex> sum(r1.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = r1[i] + r2[i] - free[i];
    CHECK(relative_difference(r12, sum) <= 1e-12);
  }

  TEST_CASE("tabulated controls: Filon quadrature and the coarse-grid refusal") {
    const auto& spec = small_spectrum();
    const double sigma_l = fixture::sigma_at_end(spec), T = 0.05;
    auto g = oracle::rng(36);
    const auto s = random_state(spec, 6, g);
    const auto f = random_sum(g, 3, 3e3);
    const std::size_t need = required_samples(spec.lambdas[5], T);
    CHECK(need % 2 == 1);
    auto table = [&](std::size_t n) {
      TabulatedSignal tab{T, std::vector<Complex>(n)};
      for (std::size_t j = 0; j < n; ++j) tab.samples[j] = f(T * j / (n - 1));
      return tab;
    };
    try {
      evolve_controlled(s, spec, sigma_l, table(need - 2), T);
      FAIL("expected a resampling refusal");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kResampling);
      CHECK(std::string(e.what()).find(std::to_string(need)) != std::string::npos);
    }
    const auto exact = evolve_controlled(s, spec, sigma_l, f, T).coefficients;
    double previous = 1.0;
    for (std::size_t n : {need, 2 * need - 1, 4 * need - 3}) {
      const double err = relative_difference(evolve_controlled(s, spec, sigma_l, table(n), T).coefficients, exact);
      CHECK(err < previous);
      previous = err;
    }
    CHECK(previous <= 1e-8);
    CHECK_THROWS_AS(evolve_controlled(s, spec, sigma_l, table(need + 1), T), Error);  // even count
  }

  TEST_CASE("oscillatory moments of pure exponentials have the closed form") {
    CHECK(std::abs(phase_integral(0.0, 2.0) - 2.0) == 0.0);
    const double d = 2 * 3.141592653589793 / 0.5;
    CHECK(std::abs(phase_integral(d, 0.5)) <= 1e-15);
    const double delta = 3.7, T = 1.3;
    const Complex ref = (std::polar(1.0, delta * T) - 1.0) / (kI * delta);
    CHECK(std::abs(phase_integral(delta, T) - ref) <= 1e-15);
    CHECK(std::abs(phase_integral(1e-9, T) - Complex{T, 0.5e-9 * T * T}) <= 1e-15);
  }

  TEST_CASE("well-posedness quotient stays bounded over random data") {
    const auto& spec = small_spectrum();
    const double sigma_l = fixture::sigma_at_end(spec), T = 0.5;
    auto g = oracle::rng(37);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const auto s = random_state(spec, 12, g);
      const auto f = random_sum(g, 3, 1e5);
      double sup = 0.0;
      for (int k = 1; k <= 20; ++k)
        sup = std::max(sup, sobolev_norm(evolve_controlled(s, spec, sigma_l, f, T * k / 20), spec, -0.5));
      // ||f||_{L2(0,T)} from the exponential Gram quadratic form.
      Complex f2{};
      for (std::size_t a = 0; a < f.frequencies.size(); ++a)
        for (std::size_t b = 0; b < f.frequencies.size(); ++b)
          f2 += std::conj(f.amplitudes[a]) * f.amplitudes[b] * phase_integral(f.frequencies[b] - f.frequencies[a], T);
      worst = std::max(worst, sup / (sobolev_norm(s, spec, -0.5) + std::sqrt(f2.real())));
    }
    CHECK(worst < 10.0);
    CHECK(worst > 0.0);
  }
}
