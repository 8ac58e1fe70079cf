#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "nhc/errors.hpp"
#include "nhc/phasespace.hpp"
#include "nhc/sampling.hpp"

using namespace nhc;

namespace {
PhasePoint pp(cplx a, cplx b) { return (CVec(2) << a, b).finished(); }
}  // namespace

TEST_CASE("omega_matrix layout and identities") {
  const RMat W1 = omega_matrix(1);
  CHECK(W1(0, 0) == 0.0);
  CHECK(W1(0, 1) == -1.0);
  CHECK(W1(1, 0) == 1.0);
  CHECK(W1(1, 1) == 0.0);
  CHECK((W1 * W1 + RMat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  const RMat W2 = omega_matrix(2);
  CHECK((W2.transpose() + W2).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(omega_matrix(0), Error);
}

TEST_CASE("symplectic_pairing") {
  CHECK(symplectic_pairing(pp(1, 0), pp(0, 1)) == cplx(-1.0));
  const PhasePoint z = pp(cplx(0.3, 1.0), cplx(-2.0, 0.5));
  CHECK(std::abs(symplectic_pairing(z, z)) == 0.0);
  const cplx v = symplectic_pairing(pp(I_unit, 1), pp(-I_unit, 1));
  CHECK(v.real() == doctest::Approx(0.0));
  CHECK(v.imag() == doctest::Approx(-2.0));
  CHECK_THROWS_AS(symplectic_pairing(pp(1, 0), CVec::Zero(4)), Error);
}

TEST_CASE("positivity_form") {
  CHECK(positivity_form(pp(I_unit, 1), pp(I_unit, 1)).real() == doctest::Approx(1.0));
  CHECK(positivity_form(pp(0.4, -1.5), pp(0.4, -1.5)).real() == doctest::Approx(0.0));
  CHECK(positivity_form(pp(2.0 * I_unit, 1), pp(2.0 * I_unit, 1)).real() == doctest::Approx(2.0));
  sampling::Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint z = sampling::random_phase_point(rng, 2);
    CHECK(std::abs(positivity_form(z, z).imag()) < 1e-14);
  }
}

TEST_CASE("is_symplectic") {
  CHECK(is_symplectic(RMat(RMat::Identity(2, 2)), 1e-12));
  CHECK(is_symplectic(omega_matrix(1), 1e-12));
  CHECK_FALSE(is_symplectic(RMat(2.0 * RMat::Identity(2, 2)), 1e-12));
  sampling::Rng rng(5);
  CHECK(is_symplectic(sampling::random_symplectic(rng, 3), 1e-10));
  CHECK(symplectic_defect(CMat(omega_matrix(2).cast<cplx>())) == 0.0);
}

TEST_CASE("split and join blocks round trip") {
  sampling::Rng rng(7);
  const RMat M = sampling::random_symmetric(rng, 4);
  const Blocks<RMat> b = split_blocks(M);
  CHECK(b.pp.rows() == 2);
  CHECK((join_blocks<RMat>(b.pp, b.pq, b.qp, b.qq) - M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hamiltonian_eval examples") {
  {
    const QuadraticHamiltonian ham(CMat::Identity(2, 2));
    const HamiltonianValue v = hamiltonian_eval(ham, 0.0, pp(1, 1));
    CHECK(v.value == cplx(1.0));
    CHECK(v.gradient == pp(1, 1));
  }
  {
    // z.z/2 + i gamma . Omega z with gamma = (0, 1)
    const RVec gamma = (RVec(2) << 0.0, 1.0).finished();
    const CVec c = I_unit * (omega_matrix(1).transpose() * gamma).cast<cplx>();
    const QuadraticHamiltonian ham(CMat::Identity(2, 2), c);
    const HamiltonianValue v = hamiltonian_eval(ham, 0.0, pp(1, 0));
    CHECK(v.value.real() == doctest::Approx(0.5));
    CHECK(v.value.imag() == doctest::Approx(1.0));
  }
  {
    CMat H = CMat::Zero(2, 2);
    H(1, 1) = I_unit;
    const HamiltonianValue v = hamiltonian_eval(QuadraticHamiltonian(H), 0.0, pp(0, 2));
    CHECK(std::abs(v.value - cplx(0.0, 2.0)) < 1e-15);
    CHECK(std::abs(v.gradient(0)) == 0.0);
    CHECK(std::abs(v.gradient(1) - cplx(0.0, 2.0)) < 1e-15);
  }
}

TEST_CASE("Hamiltonian intake symmetrizes with a warning") {
  std::vector<std::string> warnings;
  set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
  CMat H = CMat::Identity(2, 2);
  H(0, 1) = 1e-9;
  const QuadraticHamiltonian ham(H);
  const CMat Hs = ham.at(0.0).H;
  CHECK((Hs - Hs.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(warnings.size() == 1);
  warnings.clear();
  const QuadraticHamiltonian clean(CMat::Identity(2, 2));
  (void)clean.at(0.0);
  CHECK(warnings.empty());
  set_warning_sink({});
}

TEST_CASE("Hamiltonian shape and provider errors") {
  CHECK_THROWS_AS(QuadraticHamiltonian(CMat::Identity(3, 3)), Error);
  CHECK_THROWS_AS(QuadraticHamiltonian(CMat::Identity(2, 2), CVec::Zero(3)), Error);
  const auto failing = QuadraticHamiltonian::time_dependent(1, [](double t) -> HamiltonianCoefficients {
    if (t > 0.5) throw std::runtime_error("boom");
    return {CMat::Identity(2, 2), CVec()};
  });
  CHECK_NOTHROW(failing.at(0.1));
  try {
    (void)failing.at(0.9);
    FAIL("expected provider failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::provider_failure);
  }
  const auto bad_shape = QuadraticHamiltonian::time_dependent(
      1, [](double) { return HamiltonianCoefficients{CMat::Identity(4, 4), CVec()}; });
  CHECK_THROWS_AS(bad_shape.at(0.0), Error);
}
