#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nhc/errors.hpp"
#include "nhc/geometry.hpp"
#include "nhc/integrator.hpp"
#include "nhc/phasespace.hpp"

namespace nhc {

/// Norm bookkeeping for the complex phase alpha and the real log-norm beta.
///
/// norm_consistent: alpha' carries (i/2) tr(H_pp B + H_qp) + (i/4) tr(Im B^{-1} Im B'),
///   the exact constant term for psi = e^{i alpha} (det Im B)^{1/4} ...; beta' =
///   -(2/hbar) Im H(Z) - 1/2 tr[Im H Omega G Omega^T], i.e. d/dt log |psi|^2.
/// literal: alpha' uses (i/4) tr[H_pp B - H_qq B^{-1}] and beta' uses
///   -(2/hbar) Z.Im H Z - (1/hbar) Im c.Z - 1/2 tr[Im H Omega G Omega^T].
///
/// The two agree whenever Im H = 0 and Im c = 0 (beta) or when Re B = 0 and B'
/// is imaginary (alpha). The grid oracle selects norm_consistent.
enum class NormConvention { norm_consistent, literal };

std::string_view to_string(NormConvention c);
NormConvention norm_convention_from_string(std::string_view s);

struct EvolutionOptions {
  IntegratorOptions integrator;
  double hbar = 1.0;
  /// Sample spacing of returned trajectories; also caps the internal step.
  double dt_sample = 1e-2;
  NormConvention norm = NormConvention::norm_consistent;
  /// Positivity floor: breakdown when the smallest eigenvalue of Im B (or G)
  /// drops to factor * trace / dim of the initial value.
  double breakdown_factor = 1e-8;
  /// Width of the bisection bracket around a breakdown time.
  double breakdown_bracket = 1e-5;
  /// Negative control only: drop the trace terms from alpha'.
  bool ablate_alpha_trace = false;
};

struct FlowMatrix {
  CMat S;
  double t = 0.0;
};

struct DoubledFlow {
  RMat Phi;
  double t = 0.0;
};

enum class BreakdownReason { positivity_loss, step_failure, provider_failure };
std::string_view to_string(BreakdownReason r);

struct BreakdownReport {
  double t_breakdown = 0.0;
  double min_eig = 0.0;  // smallest eigenvalue of Im B or G at the last good state
  BreakdownReason reason = BreakdownReason::positivity_loss;
  std::string detail;
};

struct ComplexSample {
  double t = 0.0;
  PhasePoint z;
  CMat B;
  cplx alpha;
};

struct RealSample {
  double t = 0.0;
  RealPhasePoint Z;
  RMat G;
  double beta = 0.0;
};

struct ComplexTrajectory {
  Index n = 0;
  std::vector<ComplexSample> samples;
  std::optional<BreakdownReport> breakdown;
};

struct RealTrajectory {
  Index n = 0;
  std::vector<RealSample> samples;
  std::optional<BreakdownReport> breakdown;
};

/// S(t1) solving S' = Omega H(t) S with S(t0) = I.
FlowMatrix integrate_flow(const QuadraticHamiltonian& ham, double t0, double t1,
                          const IntegratorOptions& opts);

/// S at each requested time (ascending, all >= t0).
std::vector<FlowMatrix> integrate_flow_samples(const QuadraticHamiltonian& ham, double t0,
                                               const std::vector<double>& times,
                                               const IntegratorOptions& opts);

/// (M11 X + M12)(M21 X + M22)^{-1} over the 2x2 block partition of M.
/// Throws Error(transport_singularity) when the denominator has condition
/// number above 1e12.
template <class Matrix>
Matrix block_mobius(const Matrix& M, const Matrix& X) {
  const Index k = X.rows();
  if (M.rows() != 2 * k || M.cols() != 2 * k || X.cols() != k) {
    throw Error(ErrorKind::dimension_mismatch, "block_mobius: block sizes do not match");
  }
  const Matrix num = M.topLeftCorner(k, k) * X + M.topRightCorner(k, k);
  const Matrix den = M.bottomLeftCorner(k, k) * X + M.bottomRightCorner(k, k);
  if (!(condition_number(den) <= kMaxCondition)) {
    throw Error(ErrorKind::transport_singularity, "Mobius denominator is singular");
  }
  // num den^{-1} = (den^{-T} num^T)^T
  return den.transpose().partialPivLu().solve(num.transpose()).transpose();
}

/// S_* B. Throws Error(positivity_loss) when S L_B is no longer positive.
ShapeMatrix mobius_shape(const FlowMatrix& S, const ShapeMatrix& B);

/// (Re S - Im S J) J (Re S - Im S J)^{-1}.
ComplexStructure transport_structure(const FlowMatrix& S, const ComplexStructure& J);

/// G_SL = Omega J_SL with J_SL from transport_structure.
Metric transport_metric(const FlowMatrix& S, const Metric& G);

/// Phi(t1) solving Phi' = Omega_4n K(t) Phi, Phi(t0) = I.
DoubledFlow doubled_flow(const QuadraticHamiltonian& ham, double t0, double t1,
                         const IntegratorOptions& opts);

std::vector<DoubledFlow> doubled_flow_samples(const QuadraticHamiltonian& ham, double t0,
                                              const std::vector<double>& times,
                                              const IntegratorOptions& opts);

/// ((Omega Re S Omega^T, Omega Im S), (-Im S Omega^T, Re S)).
DoubledFlow doubled_flow_from(const FlowMatrix& S);

/// Phi_* G over the 2n-block partition of Phi.
Metric phi_star_metric(const DoubledFlow& Phi, const Metric& G);

/// Complex-WKB route: z' = Omega(Hz + c), B' = -H_qq - H_qp B - B H_pq - B H_pp B,
/// alpha per the selected NormConvention, alpha(t0) = 0.
ComplexTrajectory integrate_complex_path(const PhasePoint& z0, const ShapeMatrix& B0,
                                         const QuadraticHamiltonian& ham, double t0, double t1,
                                         const EvolutionOptions& opts);

/// Ehrenfest/Wigner route: Z' = Omega(Re H Z + Re c) + G^{-1}(Im H Z + Im c),
/// G' = Re H Omega G - G Omega Re H - Im H + G Omega^T Im H Omega G, beta per the
/// selected NormConvention, beta(t0) = 0.
RealTrajectory integrate_real_path(const RealPhasePoint& Z0, const Metric& G0,
                                   const QuadraticHamiltonian& ham, double t0, double t1,
                                   const EvolutionOptions& opts);

/// Per sample: Z = P_J(z) with J from B, G from B, beta = 2 Im alpha + 2 Im sigma / hbar.
RealTrajectory project_trajectory(const ComplexTrajectory& ct, double hbar);

/// Right-hand sides of the shape and metric Riccati equations.
CMat shape_rhs(const HamiltonianCoefficients& k, const CMat& B);
RMat metric_rhs(const HamiltonianCoefficients& k, const RMat& G);

/// max |B'| (or |G'|) at the given point for a constant Hamiltonian.
double stationary_residual(const QuadraticHamiltonian& ham, const ShapeMatrix& B);
double stationary_residual(const QuadraticHamiltonian& ham, const Metric& G);

}  // namespace nhc
