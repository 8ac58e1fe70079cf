#include "nhc/geometry.hpp"

#include <sstream>

#include "nhc/errors.hpp"
#include "nhc/phasespace.hpp"

namespace nhc {

namespace {

double scale_of(const RMat& A) { return std::max(1.0, A.cwiseAbs().maxCoeff()); }

void require_even_square(const RMat& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() == 0) {
    throw Error(ErrorKind::dimension_mismatch, std::string(what) + " must be 2n x 2n");
  }
}

RMat inverse_checked(const RMat& A, ErrorKind kind, const char* what) {
  const double cond = condition_number(A);
  if (!(cond <= kMaxCondition)) {
    std::ostringstream os;
    os << what << " has condition number " << cond;
    throw Error(kind, os.str());
  }
  return A.partialPivLu().inverse();
}

}  // namespace

double min_symmetric_eigenvalue(const RMat& A) {
  const RMat sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_positive_definite(const RMat& A) {
  if (A.rows() == 0 || A.rows() != A.cols()) return false;
  const double threshold = 1e-10 * A.trace() / static_cast<double>(A.rows());
  return A.trace() > 0.0 && min_symmetric_eigenvalue(A) > threshold;
}

double condition_number(const RMat& A) {
  Eigen::JacobiSVD<RMat> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

double condition_number(const CMat& A) {
  Eigen::JacobiSVD<CMat> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

ShapeMatrix::ShapeMatrix(CMat B) : B_(std::move(B)) {
  if (B_.rows() != B_.cols() || B_.rows() == 0) {
    throw Error(ErrorKind::dimension_mismatch, "shape matrix must be square");
  }
  if (!B_.allFinite()) throw Error(ErrorKind::invalid_shape, "non-finite shape matrix");
  const double asym = (B_ - B_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, B_.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "B is not symmetric (asymmetry " << asym << ")";
    throw Error(ErrorKind::invalid_shape, os.str());
  }
  B_ = 0.5 * (B_ + B_.transpose()).eval();
  if (!is_positive_definite(B_.imag())) {
    std::ostringstream os;
    os << "Im B is not positive definite (smallest eigenvalue "
       << min_symmetric_eigenvalue(B_.imag()) << ")";
    throw Error(ErrorKind::invalid_shape, os.str());
  }
}

Metric::Metric(RMat G, double tol) : G_(std::move(G)) {
  require_even_square(G_, "metric");
  if (!G_.allFinite()) throw Error(ErrorKind::not_positive_definite, "non-finite metric");
  const double scale = scale_of(G_);
  const double asym = (G_ - G_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream os;
    os << "metric is not symmetric (asymmetry " << asym << ")";
    throw Error(ErrorKind::not_positive_definite, os.str());
  }
  G_ = 0.5 * (G_ + G_.transpose()).eval();
  if (!is_positive_definite(G_)) {
    throw Error(ErrorKind::not_positive_definite, "metric is not positive definite");
  }
  const RMat omega = omega_matrix(dimension());
  const double defect = (G_ * omega * G_ - omega).cwiseAbs().maxCoeff();
  if (defect > tol * scale * scale) {
    std::ostringstream os;
    os << "metric violates G Omega G = Omega (defect " << defect << ")";
    throw Error(ErrorKind::not_symplectic, os.str());
  }
}

RMat Metric::inverse() const {
  // G^{-1} = -Omega G Omega for symplectic G.
  const RMat omega = omega_matrix(dimension());
  return -omega * G_ * omega;
}

ComplexStructure::ComplexStructure(RMat J, double tol) : J_(std::move(J)) {
  require_even_square(J_, "complex structure");
  if (!J_.allFinite()) throw Error(ErrorKind::not_complex_structure, "non-finite J");
  const Index n = dimension();
  const double scale = scale_of(J_);
  const double square_defect =
      (J_ * J_ + RMat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  if (square_defect > tol * scale * scale) {
    std::ostringstream os;
    os << "J^2 = -I violated (defect " << square_defect << ")";
    throw Error(ErrorKind::not_complex_structure, os.str());
  }
  if (symplectic_defect(J_) > tol * scale * scale) {
    throw Error(ErrorKind::not_symplectic, "complex structure violates J^T Omega J = Omega");
  }
  const RMat omega_j = omega_matrix(n) * J_;
  if ((omega_j - omega_j.transpose()).cwiseAbs().maxCoeff() > tol * scale ||
      !is_positive_definite(omega_j)) {
    throw Error(ErrorKind::not_complex_structure, "Omega J is not symmetric positive definite");
  }
}

LagrangianFrame::LagrangianFrame(CMat F, double tol) : F_(std::move(F)) {
  if (F_.rows() != 2 * F_.cols() || F_.cols() == 0) {
    throw Error(ErrorKind::dimension_mismatch, "Lagrangian frame must be 2n x n");
  }
  if (!is_positive_lagrangian(F_, tol)) {
    throw Error(ErrorKind::not_positive_lagrangian, "frame does not span a positive Lagrangian");
  }
  const Index n = F_.cols();
  const CMat Fq = F_.bottomRows(n);
  if (condition_number(Fq) <= kMaxCondition) {
    const CMat B = Fq.transpose().partialPivLu().solve(F_.topRows(n).transpose()).transpose();
    F_.topRows(n) = 0.5 * (B + B.transpose());
    F_.bottomRows(n) = CMat::Identity(n, n);
  }
}

bool is_positive_lagrangian(const CMat& F, double tol) {
  if (F.rows() != 2 * F.cols() || F.cols() == 0) {
    throw Error(ErrorKind::dimension_mismatch, "frame must be 2n x n");
  }
  const Index n = F.cols();
  Eigen::JacobiSVD<CMat> svd(F);
  const auto& s = svd.singularValues();
  if (!(s(n - 1) > 1e-12 * s(0))) {
    throw Error(ErrorKind::rank_deficient, "frame columns are linearly dependent");
  }
  const CMat omega = omega_matrix(n).cast<cplx>();
  if ((F.transpose() * omega * F).cwiseAbs().maxCoeff() > tol) return false;
  // A_jk = h(F e_j, F e_k) = (i/2) (F^T Omega conj(F))_jk, Hermitian.
  const CMat A = 0.5 * I_unit * (F.transpose() * omega * F.conjugate());
  const CMat herm = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
  const double fnorm2 = s(0) * s(0);
  return es.eigenvalues().minCoeff() > tol * fnorm2;
}

Metric metric_from_shape(const ShapeMatrix& shape) {
  const Index n = shape.dimension();
  const RMat re = shape.re();
  const RMat im = shape.im();
  const RMat im_inv = inverse_checked(im, ErrorKind::ill_conditioned_shape, "Im B");
  const RMat Id = RMat::Identity(n, n);
  const RMat Z0 = RMat::Zero(n, n);
  const RMat left = join_blocks<RMat>(Id, Z0, -re, Id);
  const RMat middle = join_blocks<RMat>(im_inv, Z0, Z0, im);
  const RMat right = join_blocks<RMat>(Id, -re, Z0, Id);
  RMat G = left * middle * right;
  G = 0.5 * (G + G.transpose()).eval();
  return Metric(std::move(G));
}

ShapeMatrix shape_from_metric(const Metric& G) {
  const Blocks<RMat> b = split_blocks(G.matrix());
  const RMat im = inverse_checked(b.pp, ErrorKind::ill_conditioned_shape, "G_pp");
  const RMat re = -im * b.pq;
  CMat B = re.cast<cplx>() + I_unit * im.cast<cplx>();
  return ShapeMatrix(0.5 * (B + B.transpose()).eval());
}

ComplexStructure structure_from_metric(const Metric& G) {
  return ComplexStructure(-omega_matrix(G.dimension()) * G.matrix());
}

Metric metric_from_structure(const ComplexStructure& J) {
  RMat G = omega_matrix(J.dimension()) * J.matrix();
  G = 0.5 * (G + G.transpose()).eval();
  return Metric(std::move(G));
}

ComplexStructure structure_from_shape(const ShapeMatrix& shape) {
  const RMat re = shape.re();
  const RMat im = shape.im();
  const RMat im_inv = inverse_checked(im, ErrorKind::ill_conditioned_shape, "Im B");
  RMat J = join_blocks<RMat>(-re * im_inv, im + re * im_inv * re, -im_inv, im_inv * re);
  return ComplexStructure(std::move(J));
}

LagrangianFrame frame_from_shape(const ShapeMatrix& shape) {
  const Index n = shape.dimension();
  CMat F(2 * n, n);
  F.topRows(n) = shape.matrix();
  F.bottomRows(n) = CMat::Identity(n, n);
  return LagrangianFrame(std::move(F));
}

ShapeMatrix shape_from_frame(const LagrangianFrame& frame) {
  const Index n = frame.dimension();
  const CMat& F = frame.columns();
  const CMat Fq = F.bottomRows(n);
  const double cond = condition_number(Fq);
  if (!(cond <= kMaxCondition)) {
    std::ostringstream os;
    os << "q-block of frame has condition number " << cond;
    throw Error(ErrorKind::not_positive_lagrangian, os.str());
  }
  // B = F_p F_q^{-1}, via the transposed solve F_q^T B^T = F_p^T.
  const CMat B = Fq.transpose().partialPivLu().solve(F.topRows(n).transpose()).transpose();
  return ShapeMatrix(0.5 * (B + B.transpose()));
}

ComplexStructure structure_from_frame(const LagrangianFrame& frame) {
  return structure_from_shape(shape_from_frame(frame));
}

RealPhasePoint project_centre(const PhasePoint& z, const ComplexStructure& J) {
  if (z.size() != J.matrix().rows()) {
    throw Error(ErrorKind::dimension_mismatch, "phase point does not match complex structure");
  }
  return z.real() + J.matrix() * z.imag();
}

ProjectionResult reduce_state(const PhasePoint& z, const ShapeMatrix& shape) {
  const Index n = shape.dimension();
  if (z.size() != 2 * n) {
    throw Error(ErrorKind::dimension_mismatch, "phase point does not match shape matrix");
  }
  const RealPhasePoint Z = project_centre(z, structure_from_shape(shape));
  const CVec P = Z.head(n).cast<cplx>();
  const CVec Q = Z.tail(n).cast<cplx>();
  const cplx sigma = 0.5 * cplx((P + z.head(n)).transpose() * (Q - z.tail(n)));
  return {Z, sigma};
}

cplx hermitian_inner(const PhasePoint& z, const PhasePoint& w, const Metric& G) {
  if (z.size() != w.size() || z.size() != G.matrix().rows()) {
    throw Error(ErrorKind::dimension_mismatch, "hermitian_inner operands differ in size");
  }
  const CVec wbar = w.conjugate();
  const CMat g = G.matrix().cast<cplx>();
  const CMat omega = omega_matrix(G.dimension()).cast<cplx>();
  return cplx(z.transpose() * g * wbar) - I_unit * cplx(z.transpose() * omega * wbar);
}

}  // namespace nhc
