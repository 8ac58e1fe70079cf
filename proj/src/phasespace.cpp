#include "nhc/phasespace.hpp"

#include <iostream>
#include <mutex>
#include <sstream>

#include "nhc/errors.hpp"

namespace nhc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::ill_conditioned_shape: return "ill-conditioned-shape";
    case ErrorKind::invalid_shape: return "invalid-shape";
    case ErrorKind::not_symplectic: return "not-symplectic";
    case ErrorKind::not_positive_definite: return "not-positive-definite";
    case ErrorKind::not_complex_structure: return "not-complex-structure";
    case ErrorKind::rank_deficient: return "rank-deficient";
    case ErrorKind::not_positive_lagrangian: return "not-positive-lagrangian";
    case ErrorKind::transport_singularity: return "transport-singularity";
    case ErrorKind::positivity_loss: return "positivity-loss";
    case ErrorKind::step_failure: return "step-failure";
    case ErrorKind::provider_failure: return "provider-failure";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::aliasing: return "aliasing";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

RMat omega_matrix(Index n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "omega_matrix: n must be >= 1");
  RMat omega = RMat::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = -RMat::Identity(n, n);
  omega.bottomLeftCorner(n, n) = RMat::Identity(n, n);
  return omega;
}

namespace {

void require_same_even_size(const PhasePoint& z, const PhasePoint& w) {
  if (z.size() != w.size() || z.size() % 2 != 0 || z.size() == 0) {
    std::ostringstream os;
    os << "phase points of sizes " << z.size() << " and " << w.size();
    throw Error(ErrorKind::dimension_mismatch, os.str());
  }
}

// Omega * w without forming Omega: (-w_q, w_p).
template <class Vec>
Vec apply_omega(const Vec& w) {
  const Index n = w.size() / 2;
  Vec out(w.size());
  out.head(n) = -w.tail(n);
  out.tail(n) = w.head(n);
  return out;
}

template <class Matrix>
double defect_impl(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() % 2 != 0 || M.rows() == 0) {
    throw Error(ErrorKind::dimension_mismatch, "symplectic check needs an even square matrix");
  }
  const RMat omega = omega_matrix(M.rows() / 2);
  const auto omega_s = omega.template cast<typename Matrix::Scalar>();
  return (M.transpose() * omega_s * M - omega_s).cwiseAbs().maxCoeff();
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

std::function<void(std::string_view)>& sink() {
  static std::function<void(std::string_view)> s;
  return s;
}

}  // namespace

cplx symplectic_pairing(const PhasePoint& z, const PhasePoint& w) {
  require_same_even_size(z, w);
  return z.transpose() * apply_omega(w);
}

cplx positivity_form(const PhasePoint& z, const PhasePoint& w) {
  require_same_even_size(z, w);
  const CVec wbar = w.conjugate();
  return 0.5 * I_unit * cplx(z.transpose() * apply_omega(wbar));
}

double symplectic_defect(const CMat& M) { return defect_impl(M); }
double symplectic_defect(const RMat& M) { return defect_impl(M); }

bool is_symplectic(const CMat& M, double tol) { return symplectic_defect(M) <= tol; }
bool is_symplectic(const RMat& M, double tol) { return symplectic_defect(M) <= tol; }

void set_warning_sink(std::function<void(std::string_view)> s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void emit_warning(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) {
    sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

QuadraticHamiltonian::QuadraticHamiltonian(CMat H, CVec c, std::string label)
    : n_(H.rows() / 2), label_(std::move(label)) {
  if (H.rows() != H.cols() || H.rows() % 2 != 0 || H.rows() == 0) {
    throw Error(ErrorKind::dimension_mismatch, "Hamiltonian matrix must be 2n x 2n");
  }
  constant_ = intake(n_, {std::move(H), std::move(c)});
}

QuadraticHamiltonian QuadraticHamiltonian::time_dependent(Index n, Provider provider,
                                                          std::string label) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "Hamiltonian dimension must be >= 1");
  if (!provider) throw Error(ErrorKind::invalid_argument, "empty coefficient provider");
  QuadraticHamiltonian ham;
  ham.n_ = n;
  ham.provider_ = std::move(provider);
  ham.label_ = std::move(label);
  return ham;
}

HamiltonianCoefficients QuadraticHamiltonian::intake(Index n, HamiltonianCoefficients raw) {
  if (raw.H.rows() != 2 * n || raw.H.cols() != 2 * n) {
    throw Error(ErrorKind::dimension_mismatch, "Hamiltonian matrix has the wrong shape");
  }
  if (raw.c.size() == 0) raw.c = CVec::Zero(2 * n);
  if (raw.c.size() != 2 * n) {
    throw Error(ErrorKind::dimension_mismatch, "linear term must have 2n entries");
  }
  if (!raw.H.allFinite() || !raw.c.allFinite()) {
    throw Error(ErrorKind::invalid_argument, "non-finite Hamiltonian coefficient");
  }
  const double asym = (raw.H - raw.H.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryWarnThreshold) {
    std::ostringstream os;
    os << "Hamiltonian asymmetry " << asym << " symmetrized on intake";
    emit_warning(os.str());
  }
  raw.H = 0.5 * (raw.H + raw.H.transpose()).eval();
  return raw;
}

HamiltonianCoefficients QuadraticHamiltonian::at(double t) const {
  if (!provider_) return constant_;
  HamiltonianCoefficients raw;
  try {
    raw = provider_(t);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "coefficient provider failed at t=" << t << ": " << e.what();
    throw Error(ErrorKind::provider_failure, os.str());
  }
  try {
    return intake(n_, std::move(raw));
  } catch (const Error& e) {
    std::ostringstream os;
    os << "coefficient provider returned bad data at t=" << t << ": " << e.what();
    throw Error(ErrorKind::provider_failure, os.str());
  }
}

HamiltonianValue hamiltonian_eval(const QuadraticHamiltonian& ham, double t,
                                  const PhasePoint& z) {
  if (z.size() != 2 * ham.dimension()) {
    throw Error(ErrorKind::dimension_mismatch, "phase point does not match Hamiltonian");
  }
  const HamiltonianCoefficients k = ham.at(t);
  const CVec Hz = k.H * z;
  const cplx value = 0.5 * cplx(z.transpose() * Hz) + cplx(k.c.transpose() * z);
  return {value, Hz + k.c};
}

}  // namespace nhc
