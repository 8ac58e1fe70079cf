// nhc: propagate, project, example and validate front-end.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nhc/dynamics.hpp"
#include "nhc/errors.hpp"
#include "nhc/io.hpp"
#include "nhc/oracles.hpp"
#include "nhc/scenario.hpp"
#include "nhc/validation.hpp"

namespace {

using namespace nhc;
using nlohmann::json;

enum Exit : int { ok = 0, failed = 1, config = 2, breakdown = 3, numerical = 4 };

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config:
    case ErrorKind::dimension_mismatch:
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_shape:
    case ErrorKind::ill_conditioned_shape:
    case ErrorKind::not_symplectic:
    case ErrorKind::not_positive_definite:
    case ErrorKind::not_complex_structure:
    case ErrorKind::rank_deficient:
    case ErrorKind::not_positive_lagrangian:
      return config;
    case ErrorKind::positivity_loss:
      return breakdown;
    default:
      return numerical;
  }
}

json matrix_json(const RMat& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int outcome(const std::optional<BreakdownReport>& b, const std::string& route) {
  if (!b) return ok;
  std::cerr << route << " route stopped at t=" << b->t_breakdown << " (" << to_string(b->reason)
            << "): " << b->detail << '\n';
  return b->reason == BreakdownReason::positivity_loss ? breakdown : numerical;
}

template <class Trajectory>
void emit(const std::string& path, const Trajectory& tr, const Scenario& s) {
  if (path.empty() || path == "-") {
    io::write_trajectory(std::cout, tr, s.format, s.stride);
  } else {
    io::write_file(path, tr, s.format, s.stride);
  }
}

int cmd_propagate(const std::string& config_path, const std::string& out, const std::string& format) {
  Scenario s = load_scenario(config_path);
  if (!out.empty()) s.output_path = out;
  if (!format.empty()) s.format = io::format_from_string(format);
  if (s.route == Route::both && (s.output_path.empty() || s.output_path == "-")) {
    throw Error(ErrorKind::config, "route both needs an output path");
  }
  const QuadraticHamiltonian ham = s.hamiltonian();
  const EvolutionOptions opts = s.evolution_options();
  const ShapeMatrix B0(s.B0);
  int code = ok;
  auto worst = [&code](int c) {
    if (c == numerical || (c == breakdown && code != numerical)) code = c;
  };
  if (s.route != Route::real) {
    const ComplexTrajectory ct = integrate_complex_path(s.z0, B0, ham, s.t0, s.t1, opts);
    emit(route_output_path(s.output_path, s.route, "complex"), ct, s);
    if (s.route == Route::both) {
      emit(route_output_path(s.output_path, s.route, "projected"), project_trajectory(ct, s.hbar), s);
    }
    worst(outcome(ct.breakdown, "complex"));
  }
  if (s.route != Route::complex) {
    RealPhasePoint Z0;
    double beta0 = 0.0;
    if (s.Z0) {
      Z0 = *s.Z0;
    } else {
      const ProjectionResult r = reduce_state(s.z0, B0);
      Z0 = r.Z;
      beta0 = 2.0 * r.sigma.imag() / s.hbar;
    }
    const Metric G0 = s.G0 ? Metric(*s.G0) : metric_from_shape(B0);
    RealTrajectory rt = integrate_real_path(Z0, G0, ham, s.t0, s.t1, opts);
    for (RealSample& smp : rt.samples) smp.beta += beta0;
    emit(route_output_path(s.output_path, s.route, "real"), rt, s);
    worst(outcome(rt.breakdown, "real"));
  }
  return code;
}

int cmd_project(const std::string& config_path) {
  const Scenario s = load_scenario(config_path);
  const ShapeMatrix B(s.B0);
  const ProjectionResult r = reduce_state(s.z0, B);
  const CMat F = frame_from_shape(B).columns();
  json j;
  j["Z"] = vector_json(r.Z);
  j["sigma_re"] = r.sigma.real();
  j["sigma_im"] = r.sigma.imag();
  j["frame_re"] = matrix_json(F.real());
  j["frame_im"] = matrix_json(F.imag());
  j["G"] = matrix_json(metric_from_shape(B).matrix());
  j["J"] = matrix_json(structure_from_shape(B).matrix());
  std::cout << j.dump(2) << '\n';
  return ok;
}

struct ExampleArgs {
  std::string id;
  std::optional<double> t1;
  std::vector<double> gamma;
  std::optional<double> b, q0, omega, delta_phase, hbar;
  std::vector<double> z0;
  std::string norm = "norm_consistent";
  std::string out;
  std::string format = "csv";
  double threshold = 1e-5;
};

int cmd_example(const ExampleArgs& a) {
  const ExampleId id = example_id_from_string(a.id);
  ExampleSpec spec = ExampleSpec::defaults(id);
  double t1 = 0.0;
  switch (id) {
    case ExampleId::contraction:
      t1 = 3.0;
      if (!a.gamma.empty()) {
        if (a.gamma.size() != 1) throw Error(ErrorKind::config, "contraction takes one --gamma value");
        spec.gamma = a.gamma[0];
      }
      break;
    case ExampleId::blowup: t1 = 1.2; break;
    case ExampleId::damped_oscillator: t1 = 10.0; break;
    case ExampleId::pt_shifted:
      t1 = 2.0 * std::numbers::pi;
      if (!a.gamma.empty()) {
        if (a.gamma.size() != 2) throw Error(ErrorKind::config, "pt_shifted takes two --gamma values");
        spec.gamma_vec << a.gamma[0], a.gamma[1];
      }
      break;
  }
  if (a.t1) t1 = *a.t1;
  if (a.b) spec.b = *a.b;
  if (a.q0) spec.Q0 = *a.q0;
  if (a.omega) spec.omega = *a.omega;
  if (a.delta_phase) spec.delta = std::polar(1.0, *a.delta_phase);
  if (a.hbar) spec.hbar = *a.hbar;
  if (!a.z0.empty()) {
    if (a.z0.size() != 2) throw Error(ErrorKind::config, "--z0 takes two values (P, Q)");
    spec.Z0 << a.z0[0], a.z0[1];
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  EvolutionOptions opts;
  opts.integrator = IntegratorOptions::from_environment();
  opts.norm = norm_convention_from_string(a.norm);
  const ExampleResult r = run_closed_form_example(spec, t1, opts);

  if (!a.out.empty()) {
    const io::Format f = io::format_from_string(a.format);
    const std::string ext = "." + std::string(io::to_string(f));
    if (r.closed_real) io::write_file(a.out + ".closed_real" + ext, *r.closed_real, f);
    if (r.numeric_real) io::write_file(a.out + ".numeric_real" + ext, *r.numeric_real, f);
    if (r.closed_complex) io::write_file(a.out + ".closed_complex" + ext, *r.closed_complex, f);
    if (r.numeric_complex) io::write_file(a.out + ".numeric_complex" + ext, *r.numeric_complex, f);
  }
  json j;
  j["example"] = to_string(id);
  j["t1"] = t1;
  j["norm_convention"] = to_string(opts.norm);
  j["threshold"] = a.threshold;
  for (const auto& [k, v] : r.deviations) j["deviations"][k] = v;
  for (const auto& [k, v] : r.diagnostics) j["diagnostics"][k] = v;
  const bool passed = r.max_deviation() <= a.threshold;
  j["passed"] = passed;
  std::cout << j.dump(2) << '\n';
  return passed ? ok : failed;
}

int cmd_validate(const std::string& level, std::uint64_t seed, bool inject, const std::string& out) {
  ValidationOptions o;
  o.level = validation_level_from_string(level);
  o.seed = seed;
  o.inject_fault = inject;
  const std::vector<CheckResult> results = run_validation(o);
  const std::string table = format_table(results);
  std::cout << table;
  if (!out.empty()) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error(ErrorKind::config, "cannot open '" + out + "' for writing");
    os << table;
  }
  return all_passed(results) ? ok : failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complexified coherent states under non-Hermitian quadratic Hamiltonians"};
  app.require_subcommand(1);

  std::string config_path, out, format;
  auto* prop = app.add_subcommand("propagate", "Integrate a scenario along the complex and/or real route");
  prop->add_option("--config", config_path, "Scenario JSON")->required();
  prop->add_option("--out", out, "Output path (overrides output.path)");
  prop->add_option("--format", format, "csv or jsonl (overrides output.format)");

  auto* proj = app.add_subcommand("project", "Reduce (z, B) to its real centre and phase");
  proj->add_option("--config", config_path, "Scenario JSON")->required();

  ExampleArgs ex;
  auto* exa = app.add_subcommand("example", "Run a closed-form example against the integrators");
  exa->add_option("id", ex.id, "contraction, blowup, damped_oscillator or pt_shifted")->required();
  exa->add_option("--t1", ex.t1, "End time");
  exa->add_option("--gamma", ex.gamma, "gamma (contraction) or gamma_1 gamma_2 (pt_shifted)");
  exa->add_option("--b", ex.b, "Im B0 for blowup");
  exa->add_option("--q0", ex.q0, "Initial q for blowup");
  exa->add_option("--omega", ex.omega, "Frequency for damped_oscillator");
  exa->add_option("--delta-phase", ex.delta_phase, "arg(delta) for damped_oscillator");
  exa->add_option("--hbar", ex.hbar, "Planck constant");
  exa->add_option("--z0", ex.z0, "Initial real centre P Q");
  exa->add_option("--norm", ex.norm, "norm_consistent or literal");
  exa->add_option("--out", ex.out, "Prefix for trajectory files");
  exa->add_option("--format", ex.format, "csv or jsonl");
  exa->add_option("--threshold", ex.threshold, "Pass threshold on every deviation");

  std::string level = "fast", vout;
  std::uint64_t seed = 20240611;
  bool inject = false;
  auto* val = app.add_subcommand("validate", "Run the invariant and oracle suites");
  val->add_option("--level", level, "fast or full");
  val->add_option("--seed", seed, "Seed for randomized suites");
  val->add_flag("--inject-fault", inject, "Perturb the metric so the GOmegaG check must fail");
  val->add_option("--out", vout, "Also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config;
  }

  try {
    if (*prop) return cmd_propagate(config_path, out, format);
    if (*proj) return cmd_project(config_path);
    if (*exa) return cmd_example(ex);
    if (*val) return cmd_validate(level, seed, inject, vout);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numerical;
  }
  return config;
}
