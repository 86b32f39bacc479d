#include "biharm/biharm.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "biharm/asymptotics.hpp"
#include "biharm/config.hpp"
#include "biharm/control.hpp"
#include "biharm/observability.hpp"
#include "biharm/runner.hpp"

struct bh_profile {
  biharm::CoefficientProfile profile;
};

struct bh_operator {
  biharm::DiscreteOperator op;
};

struct bh_spectrum {
  biharm::SpectralData data;
};

struct bh_control {
  biharm::ControlSolution solution;
};

namespace {

thread_local std::string last_error;

bh_status status_for(biharm::ErrorKind kind) {
  using biharm::ErrorKind;
  switch (kind) {
    case ErrorKind::kArgument: return BH_ERR_ARGUMENT;
    case ErrorKind::kConfig: return BH_ERR_CONFIG;
    case ErrorKind::kProfile: return BH_ERR_PROFILE;
    case ErrorKind::kNumerical: return BH_ERR_NUMERICAL;
    case ErrorKind::kConditioning: return BH_ERR_CONDITIONING;
    case ErrorKind::kResampling: return BH_ERR_RESAMPLING;
    case ErrorKind::kIo: return BH_ERR_IO;
  }
  return BH_ERR_INTERNAL;
}

template <class F>
bh_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return BH_OK;
  } catch (const biharm::Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return BH_ERR_INTERNAL;
}

void require(bool condition, const char* message) {
  if (!condition) throw biharm::Error(biharm::ErrorKind::kArgument, message);
}

bh_status copy_out(const std::vector<double>& values, double* out, size_t capacity) {
  return guarded([&] {
    require(out != nullptr || capacity == 0, "output buffer is null");
    std::copy_n(values.begin(), std::min(capacity, values.size()), out);
  });
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* bh_version(void) { return "1.0.0"; }

const char* bh_last_error(void) { return last_error.c_str(); }

int bh_exit_code(bh_status status) {
  using namespace biharm::cli;
  switch (status) {
    case BH_OK: return kExitOk;
    case BH_ERR_ARGUMENT:
    case BH_ERR_CONFIG:
    case BH_ERR_PROFILE: return kExitConfig;
    case BH_ERR_NUMERICAL:
    case BH_ERR_RESAMPLING: return kExitNumerical;
    case BH_ERR_CONDITIONING: return kExitConditioning;
    case BH_ERR_IO: return kExitIo;
    default: return kExitInternal;
  }
}

bh_status bh_profile_polynomial(double length, const double* rho, size_t rho_len, const double* sigma,
                                size_t sigma_len, const double* q, size_t q_len, bh_profile** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(rho && rho_len > 0 && sigma && sigma_len > 0, "rho and sigma need at least one coefficient");
    biharm::ProfileSpec spec;
    spec.length = length;
    spec.rho = biharm::CoefficientSpec::polynomial({rho, rho + rho_len});
    spec.sigma = biharm::CoefficientSpec::polynomial({sigma, sigma + sigma_len});
    if (q && q_len > 0) spec.q = biharm::CoefficientSpec::polynomial({q, q + q_len});
    *out = new bh_profile{biharm::build_profile(spec)};
  });
}

void bh_profile_free(bh_profile* profile) { delete profile; }

bh_status bh_profile_eval(const bh_profile* profile, double x, double* rho, double* sigma, double* q) {
  return guarded([&] {
    require(profile != nullptr, "profile is null");
    if (rho) *rho = profile->profile.rho(x);
    if (sigma) *sigma = profile->profile.sigma(x);
    if (q) *q = profile->profile.q(x);
  });
}

bh_status bh_geometry_gamma(const bh_profile* profile, double* gamma, double* error_estimate) {
  return guarded([&] {
    require(profile != nullptr && gamma != nullptr, "null argument");
    const auto geo = biharm::geometry(profile->profile);
    *gamma = geo.gamma();
    if (error_estimate) *error_estimate = geo.gamma_error();
  });
}

bh_status bh_assemble(const bh_profile* profile, int elements, bh_operator** out) {
  return guarded([&] {
    require(profile != nullptr && out != nullptr, "null argument");
    *out = new bh_operator{biharm::assemble(profile->profile, elements)};
  });
}

void bh_operator_free(bh_operator* op) { delete op; }

int bh_operator_dofs(const bh_operator* op) { return op ? static_cast<int>(op->op.dofs()) : 0; }

bh_status bh_spectrum_solve(const bh_operator* op, int count, bh_spectrum** out) {
  return guarded([&] {
    require(op != nullptr && out != nullptr, "null argument");
    *out = new bh_spectrum{biharm::solve_spectrum(op->op, count)};
  });
}

void bh_spectrum_free(bh_spectrum* spectrum) { delete spectrum; }

int bh_spectrum_size(const bh_spectrum* spectrum) {
  return spectrum ? static_cast<int>(spectrum->data.size()) : 0;
}

int bh_spectrum_trusted(const bh_spectrum* spectrum) { return spectrum ? spectrum->data.trusted_count : 0; }

bh_status bh_spectrum_lambdas(const bh_spectrum* spectrum, double* out, size_t capacity) {
  if (!spectrum) return guarded([] { require(false, "spectrum is null"); });
  return copy_out(spectrum->data.lambdas, out, capacity);
}

bh_status bh_spectrum_traces(const bh_spectrum* spectrum, double* out, size_t capacity) {
  if (!spectrum) return guarded([] { require(false, "spectrum is null"); });
  return copy_out(spectrum->data.traces, out, capacity);
}

bh_status bh_spectrum_residuals(const bh_spectrum* spectrum, double* out, size_t capacity) {
  if (!spectrum) return guarded([] { require(false, "spectrum is null"); });
  return copy_out(spectrum->data.residuals, out, capacity);
}

bh_status bh_spectrum_validate(const bh_spectrum* spectrum, int* passed, int* failures) {
  return guarded([&] {
    require(spectrum != nullptr, "spectrum is null");
    const auto report = biharm::validate_spectrum(spectrum->data);
    if (passed) *passed = report.pass ? 1 : 0;
    if (failures) *failures = static_cast<int>(report.failures.size());
  });
}

bh_status bh_characteristic_roots(double gamma, int count, double* out) {
  return guarded([&] {
    require(out != nullptr || count == 0, "output buffer is null");
    const auto roots = biharm::characteristic_roots(gamma, count);
    std::copy(roots.begin(), roots.end(), out);
  });
}

bh_status bh_observability_constants(const bh_spectrum* spectrum, double T, int N, bh_observability* out) {
  return guarded([&] {
    require(spectrum != nullptr && out != nullptr, "null argument");
    const auto r = biharm::observability_constants(spectrum->data, T, N);
    *out = bh_observability{r.T, r.N, r.c_T, r.C_T, r.condition, r.density, r.resolution_failure ? 1 : 0};
  });
}

bh_status bh_control_synthesize(const bh_spectrum* spectrum, const double* re, const double* im, size_t count,
                                double T, bh_control_method method, double gram_cap, bh_control** out) {
  return guarded([&] {
    require(spectrum != nullptr && out != nullptr, "null argument");
    require(count > 0 && re != nullptr && im != nullptr, "initial state is empty");
    std::vector<biharm::Complex> c(count);
    for (size_t k = 0; k < count; ++k) c[k] = {re[k], im[k]};
    const auto& spec = spectrum->data;
    const auto state = biharm::make_state(spec, std::move(c));
    biharm::ControlOptions options;
    if (gram_cap > 0) options.gram_cap = gram_cap;
    const double sigma_l = spec.op->profile().sigma(spec.op->length());
    auto solution = method == BH_CONTROL_MOMENT
                        ? biharm::synthesize_moment_control(state, spec, sigma_l, T, options)
                        : biharm::synthesize_hum_control(state, spec, sigma_l, T, options);
    *out = new bh_control{std::move(solution)};
  });
}

void bh_control_free(bh_control* control) { delete control; }

double bh_control_norm(const bh_control* control) { return control ? control->solution.control_norm : 0.0; }

double bh_control_residual(const bh_control* control) {
  return control ? control->solution.residual_final : 0.0;
}

double bh_control_gram_condition(const bh_control* control) {
  return control ? control->solution.gram_condition : 0.0;
}

bh_status bh_control_evaluate(const bh_control* control, double t, double* re_f, double* im_f) {
  return guarded([&] {
    require(control != nullptr, "control is null");
    const auto v = control->solution.control(t);
    if (re_f) *re_f = v.real();
    if (im_f) *im_f = v.imag();
  });
}

bh_status bh_run_config_kind(const char* config_text, const char* kind, const char* out_dir, int threads,
                             char** summary) {
  return guarded([&] {
    require(config_text != nullptr, "config text is null");
    require(threads >= 1, "threads must be at least 1");
    const auto cfg = biharm::cli::parse_config(config_text);
    if (kind) {
      const auto wanted = biharm::cli::parse_kind(kind);
      require(wanted.has_value(), "unknown experiment kind");
      if (*wanted != cfg.kind) {
        throw biharm::Error(biharm::ErrorKind::kConfig,
                            std::string("config declares kind = ") + std::string(biharm::cli::to_string(cfg.kind)) +
                                " but the " + kind + " command was requested");
      }
    }
    biharm::cli::RunOptions options;
    if (out_dir) options.output = out_dir;
    options.threads = threads;
    const auto report = biharm::cli::run(cfg, options);
    if (summary) *summary = duplicate(biharm::cli::render_report(report));
  });
}

bh_status bh_run_config(const char* config_text, const char* out_dir, int threads, char** summary) {
  return bh_run_config_kind(config_text, nullptr, out_dir, threads, summary);
}

void bh_free_string(char* text) { std::free(text); }

}  // extern "C"
