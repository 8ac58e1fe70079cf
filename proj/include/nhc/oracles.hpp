#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nhc/dynamics.hpp"
#include "nhc/states.hpp"

namespace nhc {

/// Applies the Weyl-quantized operator (n = 1)
///   -(hbar^2/2) H_pp d^2 + (hbar/i) H_qp x d + 1/2 H_qq x^2 - (i hbar/2) H_qp
///   + c_q x + c_p (hbar/i) d
/// with fourth-order central differences. Throws Error(resolution) when psi is
/// above 1e-6 of its peak within 5% of either box edge.
WaveFunction weyl_apply_grid(const QuadraticHamiltonian& ham, double t, const WaveFunction& psi,
                             kernels::Backend backend = kernels::default_backend());

struct ResidualReport {
  std::vector<double> times;
  std::vector<double> residual_l2;
  double max_residual = 0.0;
};

/// |i hbar d_t psi - H psi|_2 / |psi|_2 at interior samples of a uniformly
/// sampled trajectory; d_t by fourth-order central differences in time.
ResidualReport schrodinger_residual(const ComplexTrajectory& ct, const QuadraticHamiltonian& ham,
                                    const GridSpec& grid, double hbar = 1.0);

/// Grid covering every sampled state of a trajectory: the span of the real
/// centres widened by 8 sqrt(hbar / Im B) on both sides.
GridSpec covering_grid(const ComplexTrajectory& ct, double hbar, std::size_t points = 512);

/// Direct fixed-step RK4 propagation of i hbar psi' = H psi on the grid, using
/// weyl_apply_grid for H. Independent of the Gaussian ansatz.
WaveFunction propagate_on_grid(const WaveFunction& psi0, const QuadraticHamiltonian& ham,
                               double t0, double t1, double dt);

struct WignerSamples {
  GridSpec q_grid;
  GridSpec p_grid;
  std::vector<double> values;  // row-major [q index][p index]
  double at(std::size_t iq, std::size_t ip) const { return values[iq * p_grid.points + ip]; }
};

/// W(p, q) = (1/pi hbar) int conj(psi(q+y)) psi(q-y) e^{2ipy/hbar} dy on the
/// product of psi's grid and p_grid. Throws Error(aliasing) when |p| exceeds
/// pi hbar / (2 dx).
WignerSamples wigner_transform_numeric(const WaveFunction& psi, const GridSpec& p_grid,
                                       kernels::Backend backend = kernels::default_backend());

struct WignerSummary {
  double mass = 0.0;
  RealPhasePoint centroid;    // (P, Q)
  RMat covariance;            // 2 x 2 in (p, q) order
  RealPhasePoint peak;        // grid location of the maximum
};

WignerSummary summarize(const WignerSamples& w);

enum class ExampleId { contraction, blowup, damped_oscillator, pt_shifted };

std::string_view to_string(ExampleId id);
ExampleId example_id_from_string(std::string_view s);

/// Parameters of the four closed-form examples (n = 1).
struct ExampleSpec {
  ExampleId id = ExampleId::contraction;
  double hbar = 1.0;
  // contraction: Im H = -gamma S, real route from (Z0, G0)
  double gamma = 1.0;
  RMat S = RMat::Identity(2, 2);
  RMat G0 = (RMat(2, 2) << 2.0, 0.0, 0.0, 0.5).finished();
  // blowup: H = i q^2 / 2, B0 = i b, z0 = (0, Q0)
  double b = 1.0;
  double Q0 = 1.0;
  // damped oscillator: H = conj(delta)^2 p^2/2 + omega^2 q^2/2
  cplx delta = std::polar(1.0, 0.7853981633974483);
  double omega = 1.0;
  // pt_shifted: H = z.z/2 + i gamma_vec . Omega z
  RVec gamma_vec = (RVec(2) << 0.0, 1.0).finished();
  // initial real centre for contraction, damped_oscillator and pt_shifted
  RVec Z0 = (RVec(2) << 1.0, 0.0).finished();

  static ExampleSpec defaults(ExampleId id);

  /// Throws Error(invalid_argument) naming the violated constraint.
  void validate() const;
};

QuadraticHamiltonian example_hamiltonian(const ExampleSpec& spec);

struct ExampleResult {
  ExampleId id = ExampleId::contraction;
  std::optional<RealTrajectory> closed_real;
  std::optional<RealTrajectory> numeric_real;
  std::optional<ComplexTrajectory> closed_complex;
  std::optional<ComplexTrajectory> numeric_complex;
  /// Named max-norm gaps between closed form and integrators.
  std::vector<std::pair<std::string, double>> deviations;
  /// Named diagnostic values (breakdown times, singular times, sign changes).
  std::vector<std::pair<std::string, double>> diagnostics;

  double deviation(std::string_view name) const;
  double diagnostic(std::string_view name) const;
  double max_deviation() const;
};

/// Closed-form reference and generic integrator output on [0, t1].
ExampleResult run_closed_form_example(const ExampleSpec& spec, double t1, const EvolutionOptions& opts);

/// Residual of q'' + 2 omega Im(delta) q' + omega^2 q along a real trajectory,
/// with both derivatives from fourth-order differences of the Q samples.
double damped_oscillator_ode_residual(const RealTrajectory& traj, double omega, cplx delta);

/// Outcome of deciding between the two norm conventions with grid oracles.
struct NormAdjudication {
  double residual_norm_consistent = 0.0;  // Schrodinger residual, complex route
  double residual_literal = 0.0;
  double beta_error_norm_consistent = 0.0;  // max |e^{-beta} / |psi|^2 - 1| vs grid propagation
  double beta_error_literal = 0.0;
  double alpha_norm_error_norm_consistent = 0.0;  // same, using 2 Im alpha + 2 Im sigma / hbar
  double alpha_norm_error_literal = 0.0;
  NormConvention verdict = NormConvention::norm_consistent;
  std::string summary;
};

/// Runs a generic non-Hermitian system with linear term and Re B != 0 through
/// both conventions and compares against the grid oracles.
NormAdjudication adjudicate_norm_convention(double t1 = 1.0);

}  // namespace nhc
