#include "biharm/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "biharm/asymptotics.hpp"
#include "biharm/control.hpp"
#include "biharm/io.hpp"
#include "biharm/observability.hpp"

namespace biharm::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument:
    case ErrorKind::kConfig:
    case ErrorKind::kProfile: return kExitConfig;
    case ErrorKind::kNumerical:
    case ErrorKind::kResampling: return kExitNumerical;
    case ErrorKind::kConditioning: return kExitConditioning;
    case ErrorKind::kIo: return kExitIo;
  }
  return kExitInternal;
}

namespace {

using Clock = std::chrono::steady_clock;

class Session {
 public:
  Session(fs::path dir, RunReport& report) : dir_(std::move(dir)), report_(report) {}

  ~Session() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : report_.files)
      if (fs::is_regular_file(fs::symlink_status(dir_ / f, ec))) fs::remove(dir_ / f, ec);
  }

  // Existing non-file entries are never registered, so cleanup cannot touch them.
  fs::path create(const std::string& name) {
    const fs::path path = dir_ / name;
    std::error_code ec;
    const auto st = fs::symlink_status(path, ec);
    if (fs::exists(st) && !fs::is_regular_file(st)) {
      throw Error(ErrorKind::kIo, "cannot write " + path.string() + ": not a regular file");
    }
    report_.files.push_back(name);
    return path;
  }

  void commit() { committed_ = true; }

  template <class F>
  auto timed(const std::string& stage, F&& f) {
    const auto t0 = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      report_.timings.emplace_back(stage, std::chrono::duration<double>(Clock::now() - t0).count());
    } else {
      auto result = f();
      report_.timings.emplace_back(stage, std::chrono::duration<double>(Clock::now() - t0).count());
      return result;
    }
  }

 private:
  fs::path dir_;
  RunReport& report_;
  bool committed_ = false;
};

void prepare_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "cannot create output directory " + dir.string());
  }
}

void write_spectrum(Session& session, const SpectralData& spec) {
  CsvWriter csv(session.create("spectrum.csv"), "spectrum", {"n", "lambda", "mu", "trace", "residual"});
  for (std::size_t i = 0; i < spec.size(); ++i) {
    csv.cell(static_cast<int>(i) + 1).cell(spec.lambdas[i]).cell(spec.mus[i]).cell(spec.traces[i]).cell(spec.residuals[i]);
    csv.end_row();
  }
  csv.close();
}

void write_matrices(Session& session, const DiscreteOperator& op) {
  for (const auto& [name, mat] : {std::pair<std::string, const BandedSymmetric*>{"stiffness", &op.stiffness()},
                                  std::pair<std::string, const BandedSymmetric*>{"mass", &op.mass()}}) {
    CsvWriter csv(session.create(name + ".csv"), name, {"i", "j", "value"});
    const std::size_t n = mat->size(), kd = mat->bandwidth();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i >= kd ? i - kd : 0; j < std::min(n, i + kd + 1); ++j) {
        csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(j)).cell((*mat)(i, j));
        csv.end_row();
      }
    }
    csv.close();
  }
}

void write_state(Session& session, const std::string& name, const ModalState& state) {
  CsvWriter csv(session.create(name), "state", {"n", "re", "im"});
  for (std::size_t i = 0; i < state.coefficients.size(); ++i) {
    csv.cell(static_cast<int>(i) + 1).cell(state.coefficients[i].real()).cell(state.coefficients[i].imag());
    csv.end_row();
  }
  csv.close();
}

std::string json_complex_array(const std::vector<Complex>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += "[" + format_double(v[i].real()) + ", " + format_double(v[i].imag()) + "]";
  }
  return out + "]";
}

std::string json_real_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

void write_control_report(Session& session, const ControlSolution& sol) {
  std::ofstream out(session.create("control_report.json"), std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write control_report.json");
  std::vector<int> excluded = sol.excluded;
  std::string excl = "[";
  for (std::size_t i = 0; i < excluded.size(); ++i) excl += (i ? ", " : "") + std::to_string(excluded[i]);
  excl += "]";
  out << "{\n"
      << "  \"schema\": \"biharm/control_report/v" << kSchemaVersion << "\",\n"
      << "  \"T\": " << format_double(sol.T) << ",\n"
      << "  \"N\": " << sol.N << ",\n"
      << "  \"method\": \"" << sol.method << "\",\n"
      << "  \"moments\": " << json_complex_array(sol.moments) << ",\n"
      << "  \"frequencies\": " << json_real_array(sol.control.frequencies) << ",\n"
      << "  \"beta\": " << json_complex_array(sol.control.amplitudes) << ",\n"
      << "  \"control_norm\": " << format_double(sol.control_norm) << ",\n"
      << "  \"residual_final\": " << format_double(sol.residual_final) << ",\n"
      << "  \"gram_condition\": " << format_double(sol.gram_condition) << ",\n"
      << "  \"excluded_modes\": " << excl << "\n"
      << "}\n";
  out.close();
  if (!out) throw Error(ErrorKind::kIo, "failed writing control_report.json");
}

void write_waveform(Session& session, const ExponentialSum& f, double T, int samples) {
  CsvWriter csv(session.create("control_waveform.csv"), "control_waveform", {"t", "re_f", "im_f"});
  for (int k = 0; k < samples; ++k) {
    const double t = T * k / (samples - 1);
    const Complex v = f(t);
    csv.cell(t).cell(v.real()).cell(v.imag());
    csv.end_row();
  }
  csv.close();
}

ModalState initial_state(const ExperimentConfig& cfg, const SpectralData& spec) {
  const InitialSpec& init = *cfg.initial;
  if (!init.poly.empty()) {
    const Polynomial p(init.poly);
    return project_initial(spec, [&p](double x) { return Complex{p(x), 0.0}; }, cfg.modes).state;
  }
  std::vector<Complex> c(static_cast<std::size_t>(cfg.modes), Complex{});
  for (const auto& [n, v] : init.modes) c[static_cast<std::size_t>(n - 1)] += v;
  return make_state(spec, std::move(c));
}

void require_trusted(const ExperimentConfig& cfg, const SpectralData& spec, int minimum, const char* what) {
  if (spec.trusted_count < minimum) {
    std::ostringstream os;
    os << what << " needs at least " << minimum << " trusted modes; have " << spec.trusted_count
       << " (trusted = min(modes, elements / 10))";
    throw Error(ErrorKind::kConfig, os.str());
  }
  if (cfg.modes > spec.trusted_count &&
      (cfg.kind == ExperimentKind::kObservability || cfg.kind == ExperimentKind::kControl ||
       cfg.kind == ExperimentKind::kSimulate)) {
    std::ostringstream os;
    os << "modes = " << cfg.modes << " exceeds the trusted count " << spec.trusted_count
       << " for elements = " << cfg.elements << " (increase elements)";
    throw Error(ErrorKind::kConfig, os.str());
  }
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

RunReport run(const ExperimentConfig& cfg, const RunOptions& options) {
  RunReport report;
  report.kind = std::string(to_string(cfg.kind));
  const fs::path dir = options.output ? fs::path(*options.output) : fs::path(cfg.output);
  prepare_directory(dir);
  Session session(dir, report);

  const CoefficientProfile profile = session.timed("profile", [&] { return build_profile(cfg.profile); });
  const WaveGeometry geo = session.timed("geometry", [&] { return geometry(profile, cfg.quadrature_order); });
  const DiscreteOperator op = session.timed("assemble", [&] { return assemble(profile, cfg.elements); });
  const SpectralData spec = session.timed("eigensolve", [&] { return solve_spectrum(op, cfg.modes); });
  const double sigma_l = profile.sigma(profile.length());
  report.records.push_back({"spectrum",
                            {{"elements", std::to_string(cfg.elements)},
                             {"modes", std::to_string(spec.size())},
                             {"trusted", std::to_string(spec.trusted_count)},
                             {"gamma", fmt(geo.gamma())},
                             {"lambda_1", fmt(spec.lambdas.front())}}});

  switch (cfg.kind) {
    case ExperimentKind::kSpectrum: {
      require_trusted(cfg, spec, 1, "spectrum");
      write_spectrum(session, spec);
      if (cfg.dump_matrices) write_matrices(session, op);
      const auto v = validate_spectrum(spec);
      report.records.push_back({"validation",
                                {{"pass", v.pass ? "true" : "false"},
                                 {"failures", std::to_string(v.failures.size())}}});
      break;
    }
    case ExperimentKind::kAsymptotics: {
      require_trusted(cfg, spec, 5, "asymptotics");
      write_spectrum(session, spec);
      const auto sp = spacing_report(spec, geo);
      const auto gp = gap_report(spec, geo);
      const auto tr = trace_limit_report(spec, profile, geo);
      {
        CsvWriter csv(session.create("spacing.csv"), "spacing", {"n", "delta_mu", "normalized"});
        for (const auto& r : sp.rows) {
          csv.cell(r.n).cell(r.delta_mu).cell(r.normalized);
          csv.end_row();
        }
        csv.close();
      }
      {
        CsvWriter csv(session.create("gap.csv"), "gap", {"n", "gap", "normalized"});
        for (const auto& r : gp.rows) {
          csv.cell(r.n).cell(r.gap).cell(r.normalized);
          csv.end_row();
        }
        csv.close();
      }
      {
        CsvWriter csv(session.create("trace.csv"), "trace", {"n", "scaled_trace", "ratio"});
        for (const auto& r : tr.rows) {
          csv.cell(r.n).cell(r.scaled_trace).cell(r.ratio);
          csv.end_row();
        }
        csv.close();
      }
      report.records.push_back({"asymptotics",
                                {{"index_offset", std::to_string(sp.index_offset)},
                                 {"last_spacing_ratio", fmt(sp.rows.back().normalized)},
                                 {"last_gap_ratio", fmt(gp.rows.back().normalized)},
                                 {"trace_limit", fmt(tr.limit)},
                                 {"last_trace_ratio", fmt(tr.rows.back().ratio)}}});
      break;
    }
    case ExperimentKind::kObservability: {
      require_trusted(cfg, spec, 1, "observability");
      std::vector<ObservabilityReport> rows(cfg.horizons.size());
      std::vector<std::exception_ptr> errors(cfg.horizons.size());
      session.timed("observability", [&] {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
          for (std::size_t i = next++; i < rows.size(); i = next++) {
            try {
              rows[i] = observability_constants(spec, cfg.horizons[i], cfg.modes);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        };
        const int k = std::max(1, std::min<int>(options.threads, static_cast<int>(rows.size())));
        std::vector<std::thread> pool;
        for (int t = 1; t < k; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
      });
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      CsvWriter csv(session.create("observability.csv"), "observability",
                    {"T", "N", "c_T", "C_T", "condition", "density_estimate"});
      for (const auto& r : rows) {
        csv.cell(r.T).cell(r.N).cell(r.c_T).cell(r.C_T).cell(r.condition).cell(r.density);
        csv.end_row();
      }
      csv.close();
      int failures = 0;
      for (const auto& r : rows) failures += r.resolution_failure ? 1 : 0;
      report.records.push_back({"observability",
                                {{"horizons", std::to_string(rows.size())},
                                 {"resolution_failures", std::to_string(failures)}}});
      break;
    }
    case ExperimentKind::kControl: {
      require_trusted(cfg, spec, 1, "control");
      const ModalState y0 = initial_state(cfg, spec);
      ControlOptions copts;
      copts.gram_cap = cfg.gram_cap;
      const double T = cfg.horizons.front();
      const ControlSolution sol = session.timed("synthesis", [&] {
        return cfg.method == ControlMethod::kHum ? synthesize_hum_control(y0, spec, sigma_l, T, copts)
                                                 : synthesize_moment_control(y0, spec, sigma_l, T, copts);
      });
      write_control_report(session, sol);
      write_waveform(session, sol.control, T, cfg.waveform_samples);
      write_state(session, "state_initial.csv", y0);
      write_state(session, "state_final.csv", evolve_controlled(y0, spec, sigma_l, sol.control, T));
      report.records.push_back({"control",
                                {{"method", sol.method},
                                 {"T", fmt(T)},
                                 {"control_norm", fmt(sol.control_norm)},
                                 {"residual_final", fmt(sol.residual_final)},
                                 {"gram_condition", fmt(sol.gram_condition)}}});
      break;
    }
    case ExperimentKind::kSimulate: {
      require_trusted(cfg, spec, 1, "simulate");
      const ModalState y0 = initial_state(cfg, spec);
      CsvWriter csv(session.create("simulation.csv"), "simulation",
                    {"t", "norm_h_minus2", "norm_l2", "norm_h2", "output_re", "output_im"});
      for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        const double t = cfg.times[k];
        const ModalState y = evolve_free(y0, spec, t);
        const Complex out = boundary_output(y0, spec, t);
        csv.cell(t)
            .cell(sobolev_norm(y, spec, -0.5))
            .cell(sobolev_norm(y, spec, 0.0))
            .cell(sobolev_norm(y, spec, 0.5))
            .cell(out.real())
            .cell(out.imag());
        csv.end_row();
        char name[32];
        std::snprintf(name, sizeof name, "state_%03zu.csv", k);
        write_state(session, name, y);
      }
      csv.close();
      report.records.push_back({"simulate", {{"snapshots", std::to_string(cfg.times.size())}}});
      break;
    }
  }
  session.commit();
  return report;
}

std::string render_report(const RunReport& report) {
  std::ostringstream os;
  os << "schema: " << report.schema << "\nkind: " << report.kind << "\n";
  for (const auto& r : report.records) {
    os << "[" << r.name << "]\n";
    for (const auto& [k, v] : r.fields) os << "  " << k << " = " << v << "\n";
  }
  os << "files:\n";
  for (const auto& f : report.files) os << "  " << f << "\n";
  os << "timings (s):\n";
  for (const auto& [stage, s] : report.timings) os << "  " << stage << " = " << s << "\n";
  return os.str();
}

}  // namespace biharm::cli
