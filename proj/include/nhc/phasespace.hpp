#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "nhc/types.hpp"

namespace nhc {

/// Standard symplectic form ((0, -I), (I, 0)) in (p, q) block order.
RMat omega_matrix(Index n);

/// Bilinear pairing z . Omega w (no conjugation).
cplx symplectic_pairing(const PhasePoint& z, const PhasePoint& w);

/// h(z, w) = (i/2) z . Omega conj(w). h(z, z) is real; positive on positive
/// Lagrangian subspaces.
cplx positivity_form(const PhasePoint& z, const PhasePoint& w);

/// max |M^T Omega M - Omega| for a real or complex 2n x 2n matrix.
double symplectic_defect(const CMat& M);
double symplectic_defect(const RMat& M);

bool is_symplectic(const CMat& M, double tol);
bool is_symplectic(const RMat& M, double tol);

/// n x n blocks of a 2n x 2n matrix in (p, q) order.
template <class Matrix>
struct Blocks {
  Matrix pp, pq, qp, qq;
};

template <class Matrix>
Blocks<Matrix> split_blocks(const Matrix& M) {
  const Index n = M.rows() / 2;
  return {M.topLeftCorner(n, n), M.topRightCorner(n, n), M.bottomLeftCorner(n, n),
          M.bottomRightCorner(n, n)};
}

template <class Matrix>
Matrix join_blocks(const Matrix& pp, const Matrix& pq, const Matrix& qp, const Matrix& qq) {
  const Index n = pp.rows();
  Matrix M(2 * n, 2 * n);
  M << pp, pq, qp, qq;
  return M;
}

/// Coefficients of H(z) = 1/2 z.Hz + c.z at one instant.
struct HamiltonianCoefficients {
  CMat H;
  CVec c;
};

/// Diverts symmetrization warnings (default: stderr). Pass an empty function
/// to restore the default.
void set_warning_sink(std::function<void(std::string_view)> sink);
void emit_warning(std::string_view message);

/// Asymmetry above which intake symmetrization emits a warning.
inline constexpr double kSymmetryWarnThreshold = 1e-12;

/// Weyl-quantized quadratic Hamiltonian with an optional linear term.
/// Coefficients are symmetrized as (H + H^T)/2 whenever they are read.
class QuadraticHamiltonian {
 public:
  using Provider = std::function<HamiltonianCoefficients(double)>;

  QuadraticHamiltonian(CMat H, CVec c = CVec(), std::string label = {});

  static QuadraticHamiltonian time_dependent(Index n, Provider provider, std::string label = {});

  Index dimension() const noexcept { return n_; }
  bool is_constant() const noexcept { return !provider_; }
  const std::string& label() const noexcept { return label_; }

  /// Coefficients at time t. Throws Error(provider_failure) if the provider
  /// throws or returns malformed data.
  HamiltonianCoefficients at(double t) const;

 private:
  QuadraticHamiltonian() = default;
  static HamiltonianCoefficients intake(Index n, HamiltonianCoefficients raw);

  Index n_ = 0;
  HamiltonianCoefficients constant_;
  Provider provider_;
  std::string label_;
};

struct HamiltonianValue {
  cplx value;
  PhasePoint gradient;
};

/// value = 1/2 z.H(t)z + c(t).z, gradient = H(t)z + c(t).
HamiltonianValue hamiltonian_eval(const QuadraticHamiltonian& ham, double t, const PhasePoint& z);

}  // namespace nhc
