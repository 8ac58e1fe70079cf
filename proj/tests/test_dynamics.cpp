#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nhc/dynamics.hpp"
#include "nhc/sampling.hpp"

using namespace nhc;

namespace {

ShapeMatrix scalar_shape(cplx b) { return ShapeMatrix(CMat::Constant(1, 1, b)); }

QuadraticHamiltonian iq2() {
  CMat H = CMat::Zero(2, 2);
  H(1, 1) = I_unit;
  return QuadraticHamiltonian(H);
}

double gap(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }
double gap(const RMat& a, const RMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("flow of i q^2/2") {
  const FlowMatrix S = integrate_flow(iq2(), 0.0, 0.7, IntegratorOptions{});
  CMat expected(2, 2);
  expected << 1.0, -0.7 * I_unit, 0.0, 1.0;
  CHECK(gap(S.S, expected) < 1e-12);
  CHECK(S.t == 0.7);
}

TEST_CASE("flow of the harmonic oscillator is a rotation and symplectic") {
  const FlowMatrix S = integrate_flow(QuadraticHamiltonian(CMat::Identity(2, 2)), 0.0, 1.3, IntegratorOptions{});
  CMat R(2, 2);
  R << std::cos(1.3), -std::sin(1.3), std::sin(1.3), std::cos(1.3);
  CHECK(gap(S.S, R) < 1e-9);
  CHECK(symplectic_defect(S.S) < 1e-9);
}

TEST_CASE("block_mobius examples") {
  const CMat X = CMat::Constant(1, 1, I_unit);
  CHECK(std::abs(block_mobius<CMat>(omega_matrix(1).cast<cplx>(), X)(0, 0) - I_unit) < 1e-15);
  CMat M(2, 2);
  M << 1.0, 0.0, 1.0, 1.0;  // free particle at t = 1
  CHECK(std::abs(block_mobius<CMat>(M, X)(0, 0) - cplx(0.5, 0.5)) < 1e-15);
  CMat singular(2, 2);
  singular << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(block_mobius<CMat>(singular, CMat::Zero(1, 1)), Error);
}

TEST_CASE("free particle shape via mobius_shape and the Riccati equation") {
  CMat H = CMat::Zero(2, 2);
  H(0, 0) = 1.0;
  const QuadraticHamiltonian ham(H);
  const FlowMatrix S = integrate_flow(ham, 0.0, 1.0, IntegratorOptions{});
  CHECK(std::abs(mobius_shape(S, scalar_shape(I_unit)).matrix()(0, 0) - cplx(0.5, 0.5)) < 1e-10);
  EvolutionOptions o;
  const ComplexTrajectory ct = integrate_complex_path(PhasePoint::Zero(2), scalar_shape(I_unit), ham, 0.0, 1.0, o);
  CHECK(!ct.breakdown);
  CHECK(std::abs(ct.samples.back().B(0, 0) - cplx(0.5, 0.5)) < 1e-9);
}

TEST_CASE("mobius_shape reports positivity loss") {
  const FlowMatrix S{(CMat(2, 2) << 1.0, -2.0 * I_unit, 0.0, 1.0).finished(), 2.0};
  CHECK_THROWS_AS(mobius_shape(S, scalar_shape(I_unit)), Error);
}

TEST_CASE("shape and metric right-hand sides") {
  const HamiltonianCoefficients k{CMat::Identity(2, 2), CVec::Zero(2)};
  CHECK(std::abs(shape_rhs(k, CMat::Constant(1, 1, I_unit))(0, 0)) < 1e-15);
  CHECK(gap(metric_rhs(k, RMat::Identity(2, 2)), RMat(RMat::Zero(2, 2))) < 1e-15);
  CHECK(stationary_residual(QuadraticHamiltonian(CMat::Identity(2, 2)), scalar_shape(2.0 * I_unit)) ==
        doctest::Approx(3.0));
}

TEST_CASE("blowup breaks down at Im B0") {
  EvolutionOptions o;
  const ComplexTrajectory ct =
      integrate_complex_path((CVec(2) << 0.0, 1.0).finished(), scalar_shape(I_unit), iq2(), 0.0, 1.5, o);
  REQUIRE(ct.breakdown.has_value());
  CHECK(ct.breakdown->reason == BreakdownReason::positivity_loss);
  CHECK(std::abs(ct.breakdown->t_breakdown - 1.0) < 1e-3);
  CHECK(ct.samples.back().t < 1.0);
  CHECK(to_string(ct.breakdown->reason) == "positivity-loss");
}

TEST_CASE("real route of a Hermitian H leaves beta at zero") {
  EvolutionOptions o;
  const RealTrajectory rt = integrate_real_path((RVec(2) << 0.3, -0.4).finished(), Metric(RMat::Identity(2, 2)),
                                                QuadraticHamiltonian(CMat::Identity(2, 2)), 0.0, 2.0, o);
  for (const RealSample& s : rt.samples) {
    CHECK(std::abs(s.beta) < 1e-12);
    CHECK(s.Z.norm() == doctest::Approx(0.5));
  }
}

TEST_CASE("doubled flow matches Phi from S and transports G like J") {
  sampling::Rng rng(101);
  for (int k = 0; k < 5; ++k) {
    const Index n = 1 + k % 2;
    const QuadraticHamiltonian ham = sampling::random_dissipative_hamiltonian(rng, n);
    const IntegratorOptions io;
    const FlowMatrix S = integrate_flow(ham, 0.0, 0.8, io);
    const DoubledFlow Phi = doubled_flow(ham, 0.0, 0.8, io);
    CHECK(gap(Phi.Phi, doubled_flow_from(S).Phi) < 1e-8);
    const Metric G0 = metric_from_shape(sampling::random_shape(rng, n));
    CHECK(gap(phi_star_metric(Phi, G0).matrix(), transport_metric(S, G0).matrix()) < 1e-7);
  }
}

TEST_CASE("route equivalence on a time-dependent Hamiltonian") {
  sampling::Rng rng(202);
  const QuadraticHamiltonian base = sampling::random_dissipative_hamiltonian(rng, 2, 0.3, true);
  const HamiltonianCoefficients k0 = base.at(0.0);
  const QuadraticHamiltonian ham = QuadraticHamiltonian::time_dependent(2, [k0](double t) {
    return HamiltonianCoefficients{(1.0 + 0.5 * t) * k0.H, (1.0 + 0.5 * t) * k0.c};
  });
  const ShapeMatrix B = sampling::random_shape(rng, 2);
  const PhasePoint z = sampling::random_phase_point(rng, 2, 0.5);
  EvolutionOptions o;
  const RealTrajectory pj = project_trajectory(integrate_complex_path(z, B, ham, 0.0, 1.0, o), o.hbar);
  const ProjectionResult r0 = reduce_state(z, B);
  const RealTrajectory rt = integrate_real_path(r0.Z, metric_from_shape(B), ham, 0.0, 1.0, o);
  REQUIRE(pj.samples.size() == rt.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < pj.samples.size(); ++i) {
    worst = std::max({worst, (pj.samples[i].Z - rt.samples[i].Z).cwiseAbs().maxCoeff(),
                      gap(pj.samples[i].G, rt.samples[i].G),
                      std::abs(pj.samples[i].beta - rt.samples[i].beta - 2.0 * r0.sigma.imag())});
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("hbar enters the log-norm but not the centre") {
  RMat Hi = RMat::Zero(2, 2);
  Hi(1, 1) = -0.5;
  const QuadraticHamiltonian ham(CMat(RMat::Identity(2, 2).cast<cplx>() + I_unit * Hi.cast<cplx>()));
  EvolutionOptions a, b;
  b.hbar = 0.5;
  const RVec Z0 = (RVec(2) << 0.0, 1.0).finished();
  const Metric G0(RMat::Identity(2, 2));
  const RealTrajectory ra = integrate_real_path(Z0, G0, ham, 0.0, 0.5, a);
  const RealTrajectory rb = integrate_real_path(Z0, G0, ham, 0.0, 0.5, b);
  CHECK(ra.samples.back().beta != doctest::Approx(rb.samples.back().beta));
  CHECK(gap(RMat(ra.samples.back().Z), RMat(rb.samples.back().Z)) < 1e-9);
}

TEST_CASE("literal convention differs only when Im H or Im c act") {
  EvolutionOptions a, b;
  b.norm = NormConvention::literal;
  const RVec Z0 = (RVec(2) << 0.2, 1.0).finished();
  const Metric G0(RMat::Identity(2, 2));
  const QuadraticHamiltonian herm(CMat::Identity(2, 2));
  CHECK(integrate_real_path(Z0, G0, herm, 0.0, 1.0, a).samples.back().beta ==
        doctest::Approx(integrate_real_path(Z0, G0, herm, 0.0, 1.0, b).samples.back().beta));
  CHECK(to_string(NormConvention::literal) == "literal");
  CHECK(norm_convention_from_string("norm_consistent") == NormConvention::norm_consistent);
  CHECK_THROWS_AS(norm_convention_from_string("other"), Error);
}

TEST_CASE("provider failure is reported as a breakdown") {
  const QuadraticHamiltonian ham = QuadraticHamiltonian::time_dependent(1, [](double t) {
    if (t > 0.3) throw std::runtime_error("table ends");
    return HamiltonianCoefficients{CMat::Identity(2, 2), CVec()};
  });
  EvolutionOptions o;
  const ComplexTrajectory ct = integrate_complex_path(PhasePoint::Zero(2), scalar_shape(I_unit), ham, 0.0, 1.0, o);
  REQUIRE(ct.breakdown.has_value());
  CHECK(ct.breakdown->reason == BreakdownReason::provider_failure);
}
