#pragma once

#include "nhc/types.hpp"

namespace nhc {

/// Condition number above which inversions are refused.
inline constexpr double kMaxCondition = 1e12;

/// Smallest eigenvalue of the symmetric part of a real square matrix.
double min_symmetric_eigenvalue(const RMat& A);

/// Positive-definiteness test with the scale-invariant threshold
/// 1e-10 * trace / dim.
bool is_positive_definite(const RMat& A);

/// 2-norm condition number (largest over smallest singular value).
double condition_number(const RMat& A);
double condition_number(const CMat& A);

/// Complex symmetric n x n matrix with positive-definite imaginary part: a
/// point of the Siegel upper half space, parametrizing a Gaussian shape.
class ShapeMatrix {
 public:
  /// Throws Error(invalid_shape) if B is not symmetric (to 1e-9 relative) or
  /// Im B is not positive definite. Small asymmetry is removed.
  explicit ShapeMatrix(CMat B);

  const CMat& matrix() const noexcept { return B_; }
  Index dimension() const noexcept { return B_.rows(); }
  RMat re() const { return B_.real(); }
  RMat im() const { return B_.imag(); }
  double min_imag_eigenvalue() const { return min_symmetric_eigenvalue(B_.imag()); }

 private:
  CMat B_;
};

/// Real symmetric positive-definite symplectic 2n x 2n matrix.
class Metric {
 public:
  /// Tolerances are relative to max(1, |G|_max^2). Throws Error(not_symplectic)
  /// naming the violated relation G Omega G = Omega.
  explicit Metric(RMat G, double tol = 1e-9);

  const RMat& matrix() const noexcept { return G_; }
  Index dimension() const noexcept { return G_.rows() / 2; }
  RMat inverse() const;

 private:
  RMat G_;
};

/// Omega-compatible complex structure: J^2 = -I, J symplectic, Omega J > 0.
class ComplexStructure {
 public:
  explicit ComplexStructure(RMat J, double tol = 1e-9);

  const RMat& matrix() const noexcept { return J_; }
  Index dimension() const noexcept { return J_.rows() / 2; }

 private:
  RMat J_;
};

/// 2n x n complex frame spanning a positive Lagrangian subspace. Frames with an
/// invertible q-block are stored in the canonical form (B; I).
class LagrangianFrame {
 public:
  /// Throws Error(rank_deficient) or Error(not_positive_lagrangian).
  explicit LagrangianFrame(CMat F, double tol = 1e-9);

  const CMat& columns() const noexcept { return F_; }
  Index dimension() const noexcept { return F_.cols(); }

 private:
  CMat F_;
};

struct ProjectionResult {
  RealPhasePoint Z;
  cplx sigma;
};

Metric metric_from_shape(const ShapeMatrix& B);
/// Inverse of metric_from_shape: Im B = G_pp^{-1}, Re B = -Im B G_pq.
ShapeMatrix shape_from_metric(const Metric& G);
ComplexStructure structure_from_metric(const Metric& G);
Metric metric_from_structure(const ComplexStructure& J);
ComplexStructure structure_from_shape(const ShapeMatrix& B);
LagrangianFrame frame_from_shape(const ShapeMatrix& B);
ShapeMatrix shape_from_frame(const LagrangianFrame& F);
ComplexStructure structure_from_frame(const LagrangianFrame& F);

/// Isotropy |F^T Omega F|_max <= tol and the Hermitian form h restricted to
/// span(F) has smallest eigenvalue > tol * |F|^2. Throws Error(rank_deficient).
bool is_positive_lagrangian(const CMat& F, double tol);

/// P_J(z) = Re z + J Im z.
RealPhasePoint project_centre(const PhasePoint& z, const ComplexStructure& J);

/// Real centre Z = P_J(z) with J from B, and sigma = 1/2 (P + p).(Q - q), so that
/// psi_z^B = exp(i sigma / hbar) psi_Z^B.
ProjectionResult reduce_state(const PhasePoint& z, const ShapeMatrix& B);

/// Kahler inner product z.G conj(w) - i z.Omega conj(w).
cplx hermitian_inner(const PhasePoint& z, const PhasePoint& w, const Metric& G);

}  // namespace nhc
