// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nhc/dynamics.hpp"
#include "nhc/oracles.hpp"
#include "nhc/sampling.hpp"

using namespace nhc;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what, double value, double bound) {
    if (!ok) passed = false;
    detail << what << "=" << value << (ok ? " (<= " : " (VIOLATES ") << bound << ") ";
  }
  void require_at_least(bool ok, const std::string& what, double value, double bound) {
    if (!ok) passed = false;
    detail << what << "=" << value << (ok ? " (>= " : " (VIOLATES >= ") << bound << ") ";
  }
  void note(const std::string& what, double value) { detail << what << "=" << value << " "; }
};

double max_abs(const RMat& m) { return m.cwiseAbs().maxCoeff(); }
double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// Ensemble shared by criteria 3 and 4: constant H with Im H <= 0 at n = 1, 2, 3.
struct System {
  QuadraticHamiltonian ham;
  ShapeMatrix B0;
  PhasePoint z0;
};

std::vector<System> ensemble() {
  sampling::Rng rng(kSeed + 3);
  std::vector<System> out;
  for (int k = 0; k < 20; ++k) {
    const Index n = 1 + k % 3;
    QuadraticHamiltonian ham = sampling::random_dissipative_hamiltonian(rng, n, 0.3, true);
    ShapeMatrix B0 = sampling::random_shape(rng, n);
    PhasePoint z0 = sampling::random_phase_point(rng, n, 0.5);
    out.push_back({std::move(ham), std::move(B0), std::move(z0)});
  }
  return out;
}

Outcome geometry_dictionary() {
  Outcome o;
  sampling::Rng rng(kSeed + 1);
  double sympl = 0.0, j2 = 0.0, kernel = 0.0, trips = 0.0, min_omega_j = 1e300;
  for (int k = 0; k < 100; ++k) {
    const Index n = 1 + k % 3;
    const ShapeMatrix B = sampling::random_shape(rng, n);
    const RMat W = omega_matrix(n);
    const RMat G = metric_from_shape(B).matrix();
    const RMat J = structure_from_shape(B).matrix();
    sympl = std::max(sympl, max_abs(RMat(G * W * G - W)) / std::max(1.0, max_abs(G) * max_abs(G)));
    j2 = std::max(j2, max_abs(RMat(J * J + RMat::Identity(2 * n, 2 * n))));
    const RMat WJ = W * J;
    min_omega_j = std::min(min_omega_j, Eigen::SelfAdjointEigenSolver<RMat>(0.5 * (WJ + WJ.transpose()))
                                            .eigenvalues()
                                            .minCoeff());
    const CVec q = sampling::random_phase_point(rng, n).head(n);
    PhasePoint z(2 * n);
    z << B.matrix() * q, q;
    kernel = std::max(kernel, project_centre(z, ComplexStructure(J)).norm() / q.norm());
    const LagrangianFrame F = frame_from_shape(B);
    trips = std::max({trips, max_abs(CMat(shape_from_frame(F).matrix() - B.matrix())),
                      max_abs(RMat(structure_from_frame(F).matrix() - J)),
                      max_abs(CMat(shape_from_metric(metric_from_structure(ComplexStructure(J))).matrix() -
                                   B.matrix()))});
  }
  o.require(sympl <= 1e-9, "GOmegaG", sympl, 1e-9);
  o.require(j2 <= 1e-9, "J^2+I", j2, 1e-9);
  o.require_at_least(min_omega_j > 0.0, "min_eig(OmegaJ)", min_omega_j, 0.0);
  o.require(kernel <= 1e-9, "|P_J(Bq,q)|/|q|", kernel, 1e-9);
  o.require(trips <= 1e-9, "round_trip", trips, 1e-9);
  return o;
}

Outcome centre_reduction() {
  Outcome o;
  sampling::Rng rng(kSeed + 2);
  const double hbar = 1.0;
  double pointwise = 0.0, centroid_cells = 0.0, mass = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ShapeMatrix B = sampling::random_shape(rng, 1);
    const PhasePoint z = sampling::random_phase_point(rng, 1, 0.4);
    const ProjectionResult r = reduce_state(z, B);
    const GridSpec g = validation_grid(r.Z(1), B, hbar, 512);
    const WaveFunction a = evaluate_coherent_state(g, z, B, 0.0, hbar);
    const WaveFunction b = evaluate_coherent_state(g, r.Z.cast<cplx>(), B, r.sigma / hbar, hbar);
    double peak = 0.0, gap = 0.0;
    for (std::size_t j = 0; j < g.points; ++j) {
      peak = std::max(peak, std::abs(a.values[j]));
      gap = std::max(gap, std::abs(a.values[j] - b.values[j]));
    }
    pointwise = std::max(pointwise, gap / peak);

    const RMat G = metric_from_shape(B).matrix();
    const double sigma_p = std::sqrt(0.5 * hbar * G(1, 1));
    const GridSpec pg = GridSpec::centred(r.Z(0), 8.0 * sigma_p, 257);
    const WignerSummary s = summarize(wigner_transform_numeric(a, pg));
    centroid_cells = std::max({centroid_cells, std::abs(s.centroid(0) - r.Z(0)) / pg.dx(),
                               std::abs(s.centroid(1) - r.Z(1)) / g.dx()});
    const double expected = std::exp(-2.0 * r.sigma.imag() / hbar);
    mass = std::max(mass, std::abs(s.mass - expected) / expected);
  }
  o.require(pointwise <= 1e-9, "pointwise", pointwise, 1e-9);
  o.require(centroid_cells <= 1.0, "centroid_offset_cells", centroid_cells, 1.0);
  o.require(mass <= 1e-4, "mass_rel_error", mass, 1e-4);
  return o;
}

Outcome riccati_mobius(const std::vector<System>& systems) {
  Outcome o;
  double dB = 0.0, dG = 0.0;
  EvolutionOptions eo;
  eo.dt_sample = 0.05;
  const std::vector<double> times = sample_times(0.0, 1.0, eo.dt_sample);
  for (const System& s : systems) {
    const Index n = s.ham.dimension();
    const Metric G0 = metric_from_shape(s.B0);
    const ComplexTrajectory ct = integrate_complex_path(PhasePoint::Zero(2 * n), s.B0, s.ham, 0.0, 1.0, eo);
    const RealTrajectory rt = integrate_real_path(RVec::Zero(2 * n), G0, s.ham, 0.0, 1.0, eo);
    const auto flows = integrate_flow_samples(s.ham, 0.0, times, eo.integrator);
    const auto phis = doubled_flow_samples(s.ham, 0.0, times, eo.integrator);
    if (ct.samples.size() != times.size() || rt.samples.size() != times.size()) {
      o.passed = false;
      o.detail << "trajectory ended early ";
      continue;
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      dB = std::max(dB, max_abs(CMat(ct.samples[i].B - mobius_shape(flows[i], s.B0).matrix())));
      dG = std::max(dG, max_abs(RMat(rt.samples[i].G - phi_star_metric(phis[i], G0).matrix())));
    }
  }
  o.require(dB <= 1e-6, "|B_Riccati-S_*B0|", dB, 1e-6);
  o.require(dG <= 1e-6, "|G_Riccati-Phi_*G0|", dG, 1e-6);
  return o;
}

Outcome route_equivalence(const std::vector<System>& systems) {
  Outcome o;
  double dZ = 0.0, dG = 0.0, dbeta = 0.0;
  EvolutionOptions eo;
  for (const System& s : systems) {
    const RealTrajectory pj = project_trajectory(integrate_complex_path(s.z0, s.B0, s.ham, 0.0, 1.0, eo), eo.hbar);
    const ProjectionResult r0 = reduce_state(s.z0, s.B0);
    const RealTrajectory rt = integrate_real_path(r0.Z, metric_from_shape(s.B0), s.ham, 0.0, 1.0, eo);
    if (pj.samples.size() != rt.samples.size()) {
      o.passed = false;
      o.detail << "sample count mismatch ";
      continue;
    }
    for (std::size_t i = 0; i < pj.samples.size(); ++i) {
      dZ = std::max(dZ, (pj.samples[i].Z - rt.samples[i].Z).cwiseAbs().maxCoeff());
      dG = std::max(dG, max_abs(RMat(pj.samples[i].G - rt.samples[i].G)));
      dbeta = std::max(dbeta, std::abs(pj.samples[i].beta - rt.samples[i].beta - 2.0 * r0.sigma.imag() / eo.hbar));
    }
  }
  o.require(dZ <= 1e-5, "Z", dZ, 1e-5);
  o.require(dG <= 1e-5, "G", dG, 1e-5);
  o.note("beta(info)", dbeta);
  return o;
}

Outcome example_contraction() {
  Outcome o;
  EvolutionOptions eo;
  ExampleSpec spec = ExampleSpec::defaults(ExampleId::contraction);
  const ExampleResult r = run_closed_form_example(spec, 3.0, eo);
  o.require(r.deviation("G") <= 1e-6, "G", r.deviation("G"), 1e-6);
  o.require(r.deviation("Z") <= 1e-6, "Z_closed", r.deviation("Z"), 1e-6);

  // Asymptotic decay rate -d log|Z|/dt near t = 3.
  const auto& smp = r.numeric_real->samples;
  const RealSample& a = smp[smp.size() - 11];
  const RealSample& b = smp.back();
  const double rate = -std::log(b.Z.norm() / a.Z.norm()) / (b.t - a.t);
  o.require(std::abs(rate - 1.0) <= 1e-2, "|rate-1|", std::abs(rate - 1.0), 1e-2);

  spec.G0 = spec.S;
  const ExampleResult e = run_closed_form_example(spec, 3.0, eo);
  double decay = 0.0;
  for (const RealSample& s : e.numeric_real->samples) {
    decay = std::max(decay, (s.Z - std::exp(-s.t) * spec.Z0).cwiseAbs().maxCoeff());
  }
  o.require(decay <= 1e-6, "Z-e^{-t}Z0(G0=S)", decay, 1e-6);
  return o;
}

Outcome example_blowup() {
  Outcome o;
  EvolutionOptions eo;
  const ExampleResult r = run_closed_form_example(ExampleSpec::defaults(ExampleId::blowup), 1.2, eo);
  const double tc = r.diagnostic("breakdown_complex"), tr = r.diagnostic("breakdown_real");
  o.require(std::abs(tc - 1.0) <= 1e-3, "|t_break_complex-1|", std::abs(tc - 1.0), 1e-3);
  o.require(std::abs(tr - 1.0) <= 1e-3, "|t_break_real-1|", std::abs(tr - 1.0), 1e-3);
  const double q = r.diagnostic("Q_at_0.9b");
  o.require(std::abs(q - 10.0) <= 1e-6, "|Q(0.9)-10|", std::abs(q - 10.0), 1e-6);
  double q_real = std::nan("");
  for (const RealSample& s : r.numeric_real->samples) {
    if (std::abs(s.t - 0.9) < 1e-12) q_real = s.Z(1);
  }
  o.require(std::abs(q_real - 10.0) <= 1e-6, "|Q_real(0.9)-10|", std::abs(q_real - 10.0), 1e-6);
  return o;
}

Outcome example_damped() {
  Outcome o;
  const ExampleResult r = run_closed_form_example(ExampleSpec::defaults(ExampleId::damped_oscillator), 10.0, EvolutionOptions{});
  const double sb = r.diagnostic("stationary_residual_B"), sg = r.diagnostic("stationary_residual_G");
  o.require(sb <= 1e-12, "stationary_B", sb, 1e-12);
  o.require(sg <= 1e-12, "stationary_G", sg, 1e-12);
  const double ode = r.diagnostic("ode_residual");
  o.require(ode <= 1e-5, "ode_residual", ode, 1e-5);
  const double changes = r.diagnostic("sign_changes");
  if (changes != 2.0) o.passed = false;
  o.detail << "sign_changes=" << changes << (changes == 2.0 ? " (== 2) " : " (VIOLATES == 2) ");
  return o;
}

Outcome example_pt(NormConvention convention) {
  Outcome o;
  EvolutionOptions eo;
  eo.norm = convention;
  const ExampleSpec spec = ExampleSpec::defaults(ExampleId::pt_shifted);
  const double period = 2.0 * std::numbers::pi;
  const ExampleResult r = run_closed_form_example(spec, period, eo);
  const double w = convention == NormConvention::literal ? 1.0 : 2.0;
  double beta_gap = 0.0;
  for (const RealSample& s : r.numeric_real->samples) {
    beta_gap = std::max(beta_gap, std::abs(s.beta + w * spec.gamma_vec.dot(s.Z - spec.Z0)));
  }
  const RealSample& last = r.numeric_real->samples.back();
  o.require(r.diagnostic("radius_deviation") <= 1e-5, "radius_dev", r.diagnostic("radius_deviation"), 1e-5);
  o.require(beta_gap <= 1e-5, w == 1.0 ? "|beta+gamma.(Z-Z0)|" : "|beta+2gamma.(Z-Z0)|", beta_gap, 1e-5);
  o.require(r.diagnostic("closure") <= 1e-4, "|Z(2pi)-Z0|", r.diagnostic("closure"), 1e-4);
  o.require(std::abs(last.beta) <= 1e-4, "|beta(2pi)|", std::abs(last.beta), 1e-4);
  if (convention == NormConvention::norm_consistent) {
    o.require(r.deviation("beta_projected") <= 1e-5, "beta_vs_projected", r.deviation("beta_projected"), 1e-5);
  }
  return o;
}

Outcome grid_oracle() {
  Outcome o;
  const CMat B0 = CMat::Constant(1, 1, I_unit);
  auto residual = [&](const QuadraticHamiltonian& ham, const PhasePoint& z0, double t1, bool ablate) {
    EvolutionOptions eo;
    eo.dt_sample = 1e-3;
    eo.ablate_alpha_trace = ablate;
    const ComplexTrajectory ct = integrate_complex_path(z0, ShapeMatrix(B0), ham, 0.0, t1, eo);
    return schrodinger_residual(ct, ham, covering_grid(ct, eo.hbar, 512), eo.hbar).max_residual;
  };
  const QuadraticHamiltonian harmonic(CMat::Identity(2, 2));
  const QuadraticHamiltonian blowup = example_hamiltonian(ExampleSpec::defaults(ExampleId::blowup));
  const PhasePoint zh = (CVec(2) << 0.5, 1.0).finished();
  const PhasePoint zb = (CVec(2) << 0.0, 1.0).finished();
  const double rh = residual(harmonic, zh, 1.0, false);
  const double rb = residual(blowup, zb, 0.5, false);
  const double ra = residual(harmonic, zh, 1.0, true);
  o.require(rh <= 1e-4, "harmonic", rh, 1e-4);
  o.require(rb <= 1e-4, "blowup(t<=0.5)", rb, 1e-4);
  o.require_at_least(ra >= 0.1, "ablated_alpha", ra, 0.1);
  const NormAdjudication adj = adjudicate_norm_convention();
  const double winner = adj.verdict == NormConvention::norm_consistent ? adj.residual_norm_consistent
                                                                        : adj.residual_literal;
  o.detail << "verdict=" << to_string(adj.verdict) << " ";
  o.require(winner <= 1e-4, "verdict_residual", winner, 1e-4);
  o.note("loser_residual", adj.verdict == NormConvention::norm_consistent ? adj.residual_literal
                                                                          : adj.residual_norm_consistent);
  return o;
}

Outcome positivity() {
  Outcome o;
  sampling::Rng rng(kSeed + 10);
  const IntegratorOptions io;
  const std::vector<double> times = sample_times(0.0, 1.0, 0.01);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Index n = 1 + s % 3;
    const QuadraticHamiltonian ham = sampling::random_dissipative_hamiltonian(rng, n);
    const ShapeMatrix B = sampling::random_shape(rng, n);
    const auto flows = integrate_flow_samples(ham, 0.0, times, io);
    for (int p = 0; p < 10; ++p) {
      const CVec v = sampling::random_phase_point(rng, n).head(n);
      PhasePoint z(2 * n);
      z << B.matrix() * v, v;
      double prev = positivity_form(z, z).real();
      for (std::size_t i = 1; i < flows.size(); ++i) {
        const PhasePoint w = flows[i].S * z;
        const double h = positivity_form(w, w).real();
        worst = std::max(worst, (prev - h) / std::abs(prev));
        prev = h;
      }
    }
  }
  worst = std::max(worst, 0.0);
  o.require(worst <= 1e-10, "largest_relative_decrease", worst, 1e-10);
  o.note("samples_per_point", static_cast<double>(times.size() - 1));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
  bool informational = false;
};

}  // namespace

int main() {
  const std::vector<System> systems = ensemble();
  const std::vector<Criterion> criteria = {
      {1, "geometry dictionary (100 random B, n=1..3)", 5.0, geometry_dictionary},
      {2, "complex centre reduction on a 512-point grid (50 states)", 60.0, centre_reduction},
      {3, "Riccati vs Mobius transport (20 H, Im H <= 0)", 30.0, [&] { return riccati_mobius(systems); }},
      {4, "route equivalence (same ensemble)", 30.0, [&] { return route_equivalence(systems); }},
      {5, "contraction example", 0.0, example_contraction},
      {6, "blowup example", 0.0, example_blowup},
      {7, "damped oscillator example", 0.0, example_damped},
      {8, "PT-shifted oscillator, stated closed form (literal convention)", 0.0,
       [] { return example_pt(NormConvention::literal); }},
      {8, "PT-shifted oscillator, norm-consistent log-norm", 0.0,
       [] { return example_pt(NormConvention::norm_consistent); }, true},
      {9, "grid oracle residuals and norm-convention verdict", 0.0, grid_oracle},
      {10, "positivity monotonicity (20 systems x 10 points x 100 times)", 0.0, positivity},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0) o.require(secs <= c.budget_seconds, "seconds", secs, c.budget_seconds);
    const char* status = c.informational ? "INFO" : (o.passed ? "PASS" : "FAIL");
    if (!c.informational && !o.passed) all = false;
    std::printf("%s criterion %d: %s | %s| %.2fs\n", status, c.id, c.name, o.detail.str().c_str(), secs);
    if (c.informational && !o.passed) std::printf("  (informational line reports a violated bound)\n");
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
