#include "biharm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_state(const ModalState& state, const SpectralData& spec) {
  if (state.basis_ref != spec.fingerprint) {
    throw Error(ErrorKind::kArgument, "modal state belongs to a different spectrum");
  }
  if (state.coefficients.size() > static_cast<std::size_t>(spec.trusted_count)) {
    throw Error(ErrorKind::kArgument, "modal state has more coefficients than trusted modes");
  }
}

// Mode values at every element quadrature node, row per mode.
std::vector<std::vector<double>> modes_at_quadrature(const SpectralData& spec, int modes) {
  const auto& op = *spec.op;
  const auto& quad = op.quadrature();
  const double h = op.h();
  std::vector<std::vector<double>> table(static_cast<std::size_t>(modes), std::vector<double>(quad.size()));
  for (int m = 0; m < modes; ++m) {
    const auto full = op.expand(spec.modes[static_cast<std::size_t>(m)]);
    for (std::size_t k = 0; k < quad.size(); ++k) {
      const int e = std::min(static_cast<int>(quad[k].x / h), op.elements() - 1);
      const double s = (quad[k].x - e * h) / h;
      const auto shape = hermite_shape(s, h, 0);
      const std::size_t b = 2 * static_cast<std::size_t>(e);
      table[static_cast<std::size_t>(m)][k] = shape.n[0] * full[b] + shape.n[1] * full[b + 1] +
                                              shape.n[2] * full[b + 2] + shape.n[3] * full[b + 3];
    }
  }
  return table;
}

Projection project_values(const SpectralData& spec, const std::vector<Complex>& values, int modes) {
  if (modes < 1 || modes > spec.trusted_count) {
    throw Error(ErrorKind::kArgument, "project: mode count must be in [1, trusted_count]");
  }
  const auto& quad = spec.op->quadrature();
  const auto table = modes_at_quadrature(spec, modes);
  std::vector<Complex> c(static_cast<std::size_t>(modes), Complex{});
  for (int m = 0; m < modes; ++m) {
    Complex acc{};
    for (std::size_t k = 0; k < quad.size(); ++k) {
      acc += quad[k].w * quad[k].rho * table[static_cast<std::size_t>(m)][k] * values[k];
    }
    c[static_cast<std::size_t>(m)] = acc;
  }
  double err2 = 0.0, norm2 = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    Complex rec{};
    for (int m = 0; m < modes; ++m) rec += c[static_cast<std::size_t>(m)] * table[static_cast<std::size_t>(m)][k];
    err2 += quad[k].w * quad[k].rho * std::norm(values[k] - rec);
    norm2 += quad[k].w * quad[k].rho * std::norm(values[k]);
  }
  Projection p;
  p.state = make_state(spec, std::move(c));
  p.reconstruction_residual = norm2 > 0.0 ? std::sqrt(err2 / norm2) : 0.0;
  return p;
}

}  // namespace

ModalState make_state(const SpectralData& spec, std::vector<Complex> coefficients, double time) {
  if (coefficients.size() > static_cast<std::size_t>(spec.trusted_count)) {
    std::ostringstream os;
    os << "modal state with " << coefficients.size() << " coefficients exceeds trusted_count "
       << spec.trusted_count;
    throw Error(ErrorKind::kArgument, os.str());
  }
  return ModalState{std::move(coefficients), time, spec.fingerprint};
}

Projection project_initial(const SpectralData& spec, const std::function<Complex(double)>& y0, int modes) {
  const auto& quad = spec.op->quadrature();
  std::vector<Complex> values(quad.size());
  for (std::size_t k = 0; k < quad.size(); ++k) values[k] = y0(quad[k].x);
  return project_values(spec, values, modes);
}

Projection project_samples(const SpectralData& spec, const std::vector<double>& x,
                           const std::vector<Complex>& values, int modes) {
  const auto& op = *spec.op;
  const std::size_t required = 2 * static_cast<std::size_t>(op.elements()) + 1;
  if (x.size() != values.size()) throw Error(ErrorKind::kArgument, "project_samples: size mismatch");
  if (x.size() < required) {
    std::ostringstream os;
    os << "sample grid too coarse for the mesh: " << x.size() << " samples, need at least " << required;
    throw Error(ErrorKind::kResampling, os.str());
  }
  const double tol = 1e-12 * op.length();
  if (x.front() > tol || x.back() < op.length() - tol) {
    throw Error(ErrorKind::kResampling, "sample grid does not cover [0, l]");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw Error(ErrorKind::kResampling, "sample abscissae must be strictly increasing");
  }
  const auto& quad = op.quadrature();
  std::vector<Complex> at_quad(quad.size());
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const double xq = quad[k].x;
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const long hi = std::distance(x.begin(), it);
    const long start = std::clamp<long>(hi - 2, 0, static_cast<long>(x.size()) - 4);
    Complex v{};
    for (long a = start; a < start + 4; ++a) {
      double w = 1.0;
      for (long b = start; b < start + 4; ++b) {
        if (b != a) w *= (xq - x[static_cast<std::size_t>(b)]) / (x[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(b)]);
      }
      v += w * values[static_cast<std::size_t>(a)];
    }
    at_quad[k] = v;
  }
  return project_values(spec, at_quad, modes);
}

ModalState evolve_free(const ModalState& state, const SpectralData& spec, double t) {
  check_state(state, spec);
  ModalState out = state;
  for (std::size_t n = 0; n < out.coefficients.size(); ++n) {
    out.coefficients[n] = state.coefficients[n] * std::polar(1.0, spec.lambdas[n] * t);
  }
  out.time = state.time + t;
  return out;
}

double sobolev_norm(const ModalState& state, const SpectralData& spec, double theta) {
  check_state(state, spec);
  double acc = 0.0;
  for (std::size_t n = 0; n < state.coefficients.size(); ++n) {
    acc += std::pow(spec.lambdas[n], 2.0 * theta) * std::norm(state.coefficients[n]);
  }
  return std::sqrt(acc);
}

Complex ExponentialSum::operator()(double t) const {
  Complex acc{};
  for (std::size_t k = 0; k < frequencies.size(); ++k) acc += amplitudes[k] * std::polar(1.0, frequencies[k] * t);
  return acc;
}

Complex phase_integral(double delta, double T) {
  const double half = 0.5 * delta * T;
  double sinc;
  if (std::abs(half) < 1e-4) {
    const double h2 = half * half;
    sinc = 1.0 - h2 / 6.0 + h2 * h2 / 120.0;
  } else {
    sinc = std::sin(half) / half;
  }
  return T * sinc * std::polar(1.0, half);
}

namespace {

// int_{-h}^{h} u^k e^{-i w u} du for k = 0, 1, 2.
struct FilonWeights {
  Complex i0, i1, i2;
};

FilonWeights filon_weights(double w, double h) {
  const double th = w * h;
  double s0, s1, s2;  // sin t / t, (sin t - t cos t) / t^2, sin t / t + 2 cos t / t^2 - 2 sin t / t^3
  if (std::abs(th) < 0.05) {
    const double t2 = th * th;
    s0 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0;
    s1 = th * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0 - t2 * t2 * t2 / 45360.0);
    s2 = 1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0 - t2 * t2 * t2 / 6480.0;
  } else {
    const double sn = std::sin(th), cs = std::cos(th);
    s0 = sn / th;
    s1 = (sn - th * cs) / (th * th);
    s2 = sn / th + 2.0 * cs / (th * th) - 2.0 * sn / (th * th * th);
  }
  return {Complex{2.0 * h * s0, 0.0}, Complex{0.0, -2.0 * h * h * s1}, Complex{2.0 * h * h * h * s2, 0.0}};
}

Complex filon_moment(const TabulatedSignal& f, double lambda, double T) {
  const std::size_t n = f.samples.size();
  const double h = T / static_cast<double>(n - 1);
  const auto fw = filon_weights(lambda, h);
  Complex acc{};
  for (std::size_t j = 0; j + 2 < n; j += 2) {
    const Complex f0 = f.samples[j], f1 = f.samples[j + 1], f2 = f.samples[j + 2];
    const Complex b = (f2 - f0) / (2.0 * h);
    const Complex c = (f2 - 2.0 * f1 + f0) / (2.0 * h * h);
    const double centre = static_cast<double>(j + 1) * h;
    acc += std::polar(1.0, -lambda * centre) * (f1 * fw.i0 + b * fw.i1 + c * fw.i2);
  }
  return acc;
}

void check_tabulated(const TabulatedSignal& f, double T) {
  const std::size_t n = f.samples.size();
  if (n < 3 || n % 2 == 0) {
    throw Error(ErrorKind::kArgument, "tabulated signal needs an odd number (>= 3) of samples");
  }
  if (std::abs(f.duration - T) > 1e-12 * std::max(1.0, T)) {
    throw Error(ErrorKind::kArgument, "tabulated signal duration does not match the horizon");
  }
}

}  // namespace

std::size_t required_samples(double lambda_max, double T) {
  const double periods = std::abs(lambda_max) * T / (2.0 * std::numbers::pi);
  auto n = static_cast<std::size_t>(std::ceil(kSamplesPerPeriod * periods)) + 1;
  if (n < 3) n = 3;
  if (n % 2 == 0) ++n;
  return n;
}

Complex oscillatory_moment(const ControlSignal& f, double lambda, double T) {
  if (const auto* sum = std::get_if<ExponentialSum>(&f)) {
    Complex acc{};
    for (std::size_t k = 0; k < sum->frequencies.size(); ++k) {
      acc += sum->amplitudes[k] * phase_integral(sum->frequencies[k] - lambda, T);
    }
    return acc;
  }
  const auto& tab = std::get<TabulatedSignal>(f);
  check_tabulated(tab, T);
  return filon_moment(tab, lambda, T);
}

ModalState evolve_controlled(const ModalState& state0, const SpectralData& spec, double sigma_l,
                             const ControlSignal& f, double T) {
  check_state(state0, spec);
  if (!(T > 0.0)) throw Error(ErrorKind::kArgument, "evolve_controlled: horizon must be positive");
  if (const auto* sum = std::get_if<ExponentialSum>(&f)) {
    if (sum->frequencies.size() != sum->amplitudes.size()) {
      throw Error(ErrorKind::kArgument, "exponential sum: frequency/amplitude size mismatch");
    }
  } else {
    const auto& tab = std::get<TabulatedSignal>(f);
    check_tabulated(tab, T);
    double lambda_max = 0.0;
    for (std::size_t n = 0; n < state0.coefficients.size(); ++n) lambda_max = std::max(lambda_max, spec.lambdas[n]);
    const std::size_t need = required_samples(lambda_max, T);
    if (tab.samples.size() < need) {
      std::ostringstream os;
      os << "tabulated control too coarse: " << tab.samples.size() << " samples, need at least " << need
         << " (" << kSamplesPerPeriod << " per period of the fastest mode)";
      throw Error(ErrorKind::kResampling, os.str());
    }
  }
  ModalState out = state0;
  for (std::size_t n = 0; n < out.coefficients.size(); ++n) {
    const Complex forcing = kI * sigma_l * spec.traces[n] * oscillatory_moment(f, spec.lambdas[n], T);
    Complex a = state0.coefficients[n];
    if (forcing != Complex{}) a += forcing;
    out.coefficients[n] = a * std::polar(1.0, spec.lambdas[n] * T);
  }
  out.time = state0.time + T;
  return out;
}

}  // namespace biharm
