#include "nhc/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace nhc::sampling {

namespace {

double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

RMat random_matrix(Rng& rng, Index r, Index c) {
  RMat M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = gauss(rng);
  return M;
}

}  // namespace

RMat random_symmetric(Rng& rng, Index k, double scale) {
  const RMat A = random_matrix(rng, k, k);
  return 0.5 * scale * (A + A.transpose());
}

ShapeMatrix random_shape(Rng& rng, Index n) {
  const RMat A = random_matrix(rng, n, n);
  const RMat im = A * A.transpose() / static_cast<double>(n) + 0.5 * RMat::Identity(n, n);
  const RMat re = random_symmetric(rng, n, 0.5);
  return ShapeMatrix(re.cast<cplx>() + I_unit * im.cast<cplx>());
}

PhasePoint random_phase_point(Rng& rng, Index n, double scale) {
  PhasePoint z(2 * n);
  for (Index i = 0; i < 2 * n; ++i) z(i) = scale * cplx(gauss(rng), gauss(rng));
  return z;
}

QuadraticHamiltonian random_dissipative_hamiltonian(Rng& rng, Index n, double damping,
                                                    bool linear_term) {
  const RMat re = random_symmetric(rng, 2 * n);
  const RMat C = random_matrix(rng, 2 * n, 2 * n);
  const RMat im = -damping * C * C.transpose() / static_cast<double>(2 * n);
  CVec c = CVec::Zero(2 * n);
  if (linear_term) c = random_phase_point(rng, n, 0.5);
  return QuadraticHamiltonian(re.cast<cplx>() + I_unit * im.cast<cplx>(), c, "random");
}

RMat random_symplectic(Rng& rng, Index n, double t) {
  const RMat K = random_symmetric(rng, 2 * n);
  const RMat A = t * omega_matrix(n) * K;
  return A.exp();
}

}  // namespace nhc::sampling
