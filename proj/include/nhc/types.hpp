#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nhc {

using cplx = std::complex<double>;
using Index = Eigen::Index;

using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Phase-space points are ordered (p_1..p_n, q_1..q_n).
using PhasePoint = CVec;
using RealPhasePoint = RVec;

inline constexpr cplx I_unit{0.0, 1.0};

}  // namespace nhc
