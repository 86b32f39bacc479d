#include <doctest.h>

#include <cmath>
#include <random>

#include "biharm/control.hpp"
#include "biharm/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace biharm;
using fixture::Profile;

namespace {

constexpr Complex kI{0.0, 1.0};

const SpectralData& unit_beam() { return fixture::spectrum(Profile::kConstant, 256, 20); }

ModalState first_two(const SpectralData& spec, int N) {
  std::vector<Complex> c(static_cast<std::size_t>(N));
  c[0] = 1.0;
  c[1] = 1.0;
  return make_state(spec, std::move(c));
}

ModalState random_state(const SpectralData& spec, int modes, std::mt19937_64& g) {
  std::vector<Complex> c(static_cast<std::size_t>(modes));
  for (auto& v : c) v = oracle::complex_normal(g);
  return make_state(spec, std::move(c));
}

double l2_by_quadrature(const ExponentialSum& f, double T, int panels) {
  return std::sqrt(oracle::simpson([&](double t) { return std::norm(f(t)); }, 0.0, T, panels));
}

ExponentialSum scaled(const ExponentialSum& f, Complex s) {
  ExponentialSum out = f;
  for (auto& a : out.amplitudes) a *= s;
  return out;
}

}  // namespace

TEST_SUITE("control") {
  TEST_CASE("null moments: zero state, linearity and the explicit formula") {
    const auto& spec = unit_beam();
    const double sl = fixture::sigma_at_end(spec);
    const auto zero = moments_for_null(make_state(spec, std::vector<Complex>(12)), spec, sl);
    for (const auto& m : zero.moments) CHECK(m == Complex{});
    auto g = oracle::rng(51);
    const auto s = random_state(spec, 12, g);
    const auto a = moments_for_null(s, spec, sl);
    auto s3 = s;
    for (auto& c : s3.coefficients) c *= Complex{0.0, 3.0};
    const auto b = moments_for_null(s3, spec, sl);
    for (int n = 0; n < 12; ++n) {
      CHECK(std::abs(b.moments[n] - Complex{0.0, 3.0} * a.moments[n]) <= 1e-15 * std::abs(b.moments[n]));
      CHECK(std::abs(a.moments[n] - kI * s.coefficients[n] / (sl * spec.traces[n])) <= 1e-16 * std::abs(a.moments[n]));
    }
  }

  TEST_CASE("modes with a vanishing trace are excluded") {
    auto spec = unit_beam();
    spec.traces[2] = 1e-9;
    const auto s = make_state(spec, std::vector<Complex>(6, Complex{1.0, 0.0}));
    const auto m = moments_for_null(s, spec, 1.0);
    REQUIRE(m.excluded == std::vector<int>{3});
    CHECK(m.moments[2] == Complex{});
    const auto sol = synthesize_moment_control(s, spec, 1.0, 0.5);
    CHECK(sol.excluded == std::vector<int>{3});
    CHECK(sol.control.frequencies.size() == 5);
  }

  TEST_CASE("one mode: beta = m / T and the forward residual vanishes") {
    const auto& spec = unit_beam();
    const double sl = fixture::sigma_at_end(spec), T = 0.3;
    const auto s = make_state(spec, {Complex{0.7, -0.1}});
    const auto sol = synthesize_moment_control(s, spec, sl, T);
    REQUIRE(sol.control.amplitudes.size() == 1);
    CHECK(std::abs(sol.control.amplitudes[0] - sol.moments[0] / T) <= 1e-15 * std::abs(sol.moments[0] / T));
    const auto end = evolve_controlled(s, spec, sl, sol.control, T);
    CHECK(std::abs(end.coefficients[0]) <= 1e-12);
  }

  TEST_CASE("phi_1 + phi_2 with N = 12, T = 0.5 is steered to rest by both routes") {
    const auto& spec = unit_beam();
    const double sl = fixture::sigma_at_end(spec);
    const auto s = first_two(spec, 12);
    const auto mom = synthesize_moment_control(s, spec, sl, 0.5);
    const auto hum = synthesize_hum_control(s, spec, sl, 0.5);
    CHECK(mom.residual_final <= 1e-8);
    CHECK(hum.residual_final <= 1e-8);
    CHECK(hum.cg_converged);
    CHECK(hum.cg_relative_residual <= 1e-12);
    CHECK(relative_l2_difference(mom.control, hum.control, 0.5) <= 1e-8);
    CHECK(mom.method == "moment");
    CHECK(hum.method == "hum");
  }

  TEST_CASE("phi_1 alone with N = 12 is steered to rest by HUM") {
    const auto& spec = unit_beam();
    std::vector<Complex> c(12);
    c[0] = 1.0;
    const auto hum = synthesize_hum_control(make_state(spec, c), spec, fixture::sigma_at_end(spec), 0.5);
    CHECK(hum.residual_final <= 1e-8);
  }

  TEST_CASE("control norm squared equals beta^H G beta and the L2 integral") {
    const auto& spec = fixture::spectrum(Profile::kVariable, 128, 12);
    const double sl = fixture::sigma_at_end(spec), T = 0.05;
    auto g = oracle::rng(52);
    const auto s = random_state(spec, 4, g);
    const auto sol = synthesize_moment_control(s, spec, sl, T);
    const auto G = gram(sol.control.frequencies, T).G;
    Eigen::VectorXcd b(4);
    for (int i = 0; i < 4; ++i) b(i) = sol.control.amplitudes[i];
    CHECK(sol.control_norm * sol.control_norm == doctest::Approx((b.adjoint() * G * b)(0, 0).real()).epsilon(1e-12));
    CHECK(sol.control_norm == doctest::Approx(l2_by_quadrature(sol.control, T, 400000)).epsilon(1e-9));
  }

  TEST_CASE("doubling T never increases the control norm") {
    const auto& spec = unit_beam();
    const double sl = fixture::sigma_at_end(spec);
    auto g = oracle::rng(53);
    for (int trial = 0; trial < 5; ++trial) {
      const auto s = random_state(spec, 10, g);
      double previous = std::numeric_limits<double>::infinity();
      for (double T : {0.25, 0.5, 1.0, 2.0}) {
        const double norm = synthesize_moment_control(s, spec, sl, T).control_norm;
        CHECK(norm <= previous * (1 + 1e-12));
        previous = norm;
      }
    }
  }

  TEST_CASE("HUM operator: scalar case, positivity and the output quadratic form") {
    const auto& spec = fixture::spectrum(Profile::kVariable, 128, 12);
    const double sl = fixture::sigma_at_end(spec);
    const auto one = hum_operator(spec, 0.4, 1, sl);
    CHECK(one(0, 0).real() == doctest::Approx(sl * spec.traces[0] * spec.traces[0] * 0.4).epsilon(1e-15));
    const auto full = hum_operator(spec, 0.5, 12, sl);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(full, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues()(0) > 0.0);
    const double T = 0.02;
    const auto lam = hum_operator(spec, T, 5, sl);
    auto g = oracle::rng(54);
    for (int trial = 0; trial < 3; ++trial) {
      const auto s = random_state(spec, 5, g);
      Eigen::VectorXcd c(5);
      for (int i = 0; i < 5; ++i) c(i) = s.coefficients[i];
      const double ref =
          sl * oracle::simpson([&](double t) { return std::norm(boundary_output(s, spec, t)); }, 0.0, T, 400000);
      CHECK((c.adjoint() * lam * c)(0, 0).real() == doctest::Approx(ref).epsilon(1e-10));
    }
  }

  TEST_CASE("zero initial state gives a zero HUM datum and a zero control") {
    const auto& spec = unit_beam();
    const auto hum = synthesize_hum_control(make_state(spec, std::vector<Complex>(12)), spec, 1.0, 0.5);
    for (const auto& c : hum.hum_datum) CHECK(c == Complex{});
    CHECK(hum.control_norm == 0.0);
    CHECK(hum.residual_final == 0.0);
  }

  TEST_CASE("random data: null residual, method agreement and linearity") {
    const auto& spec = unit_beam();
    const double sl = fixture::sigma_at_end(spec), T = 0.5;
    auto g = oracle::rng(55);
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = random_state(spec, 12, g), b = random_state(spec, 12, g);
      auto ab = a;
      for (std::size_t i = 0; i < ab.coefficients.size(); ++i) ab.coefficients[i] += b.coefficients[i];
      const auto fa = synthesize_hum_control(a, spec, sl, T), fb = synthesize_hum_control(b, spec, sl, T);
      const auto fab = synthesize_hum_control(ab, spec, sl, T);
      const auto ma = synthesize_moment_control(a, spec, sl, T);
      CHECK(fa.residual_final <= 1e-8);
      CHECK(ma.residual_final <= 1e-8);
      CHECK(relative_l2_difference(ma.control, fa.control, T) <= 1e-8);
      ExponentialSum sum = fa.control;
      for (std::size_t k = 0; k < sum.amplitudes.size(); ++k) sum.amplitudes[k] += fb.control.amplitudes[k];
      CHECK(relative_l2_difference(fab.control, sum, T) <= 1e-10);
    }
  }

  TEST_CASE("reversal: -f steers rest to the free evolution, conj(f(T - t)) steers rest to conj(y0)") {
    const auto& spec = unit_beam();
    const double sl = fixture::sigma_at_end(spec), T = 0.5;
    auto g = oracle::rng(56);
    const auto s = random_state(spec, 12, g);
    const auto f = synthesize_hum_control(s, spec, sl, T).control;
    const auto rest = make_state(spec, std::vector<Complex>(12));
    const auto free = evolve_free(s, spec, T);
    const auto a = evolve_controlled(rest, spec, sl, scaled(f, -1.0), T);
    ExponentialSum reversed = f;
    for (std::size_t k = 0; k < reversed.amplitudes.size(); ++k)
      reversed.amplitudes[k] = std::conj(f.amplitudes[k]) * std::polar(1.0, -f.frequencies[k] * T);
    const auto b = evolve_controlled(rest, spec, sl, reversed, T);
    for (int n = 0; n < 12; ++n) {
      const double scale = std::abs(s.coefficients[n]);
      CHECK(std::abs(a.coefficients[n] - free.coefficients[n]) <= 1e-8 * scale);
      CHECK(std::abs(b.coefficients[n] - std::conj(s.coefficients[n])) <= 1e-8 * scale);
    }
  }

  TEST_CASE("short horizons are refused once the Gram condition passes the cap") {
    const auto& spec = unit_beam();
    const auto s = first_two(spec, 12);
    const double sl = fixture::sigma_at_end(spec);
    auto refused = [&](double T) {
      try {
        synthesize_moment_control(s, spec, sl, T);
        return false;
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kConditioning);
        CHECK(std::string(e.what()).find("increase T") != std::string::npos);
        return true;
      }
    };
    double lo = 1e-8, hi = 0.5;  // refused at lo, accepted at hi
    REQUIRE(refused(lo));
    REQUIRE_FALSE(refused(hi));
    for (int it = 0; it < 40; ++it) {
      const double mid = std::sqrt(lo * hi);
      (refused(mid) ? lo : hi) = mid;
    }
    CHECK(gram(std::span<const double>(spec.lambdas.data(), 12), lo).condition > 1e12);
    CHECK(gram(std::span<const double>(spec.lambdas.data(), 12), hi).condition <= 1e12);
    ControlOptions loose;
    loose.gram_cap = 1e30;
    CHECK_THROWS_AS(synthesize_hum_control(s, spec, sl, lo, ControlOptions{}), Error);
  }

  TEST_CASE("argument checks") {
    const auto& spec = unit_beam();
    const auto s = first_two(spec, 4);
    CHECK_THROWS_AS(synthesize_moment_control(s, spec, 0.0, 0.5), Error);
    CHECK_THROWS_AS(synthesize_moment_control(s, spec, 1.0, 0.0), Error);
    CHECK_THROWS_AS(hum_operator(spec, 0.5, 0, 1.0), Error);
  }
}
