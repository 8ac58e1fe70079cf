#pragma once

#include <span>

#include "nhc/types.hpp"

// Data-parallel grid kernels. Every kernel has a serial reference and an
// OpenMP version computing each output element with identical arithmetic, so
// the two agree bit for bit.
namespace nhc::kernels {

enum class Backend { serial, openmp };

/// Default backend for library calls: openmp when compiled with OpenMP.
Backend default_backend() noexcept;
bool openmp_available() noexcept;
int max_threads() noexcept;

/// out_j = prefactor * exp((i/hbar)[p (x_j - q) + 1/2 B (x_j - q)^2]).
void coherent_state(std::span<const double> x, cplx p, cplx q, cplx B, cplx prefactor,
                    double hbar, std::span<cplx> out, Backend backend);

/// out_k = amplitude * exp(-(z_k - Z).G(z_k - Z) / hbar); points are stored
/// row-major, dim = 2n entries per point.
void wigner_gaussian(std::span<const double> points, const RVec& Z, const RMat& G,
                     double amplitude, double hbar, std::span<double> out, Backend backend);

/// Coefficients of the 1-d operator
/// d2 f'' + (d1_const + d1_lin x) f' + (d0_const + d0_lin x + d0_quad x^2) f.
struct QuadraticOperator {
  cplx d2{0.0}, d1_const{0.0}, d1_lin{0.0}, d0_const{0.0}, d0_lin{0.0}, d0_quad{0.0};
};

/// Applies the operator with fourth-order central differences on the uniform
/// grid x_j = x0 + j dx; samples beyond the ends are taken as zero.
void apply_quadratic_operator(std::span<const cplx> psi, double x0, double dx,
                              const QuadraticOperator& op, std::span<cplx> out, Backend backend);

/// Discrete Wigner transform on the product grid (x_k, p_l):
/// W(p, x_k) = (dx / (pi hbar)) [f_0 + 2 Re sum_{m>=1} f_m e^{2 i p m dx / hbar}],
/// f_m = conj(psi_{k+m}) psi_{k-m}. out is row-major [k][l].
void wigner_transform(std::span<const cplx> psi, double dx, std::span<const double> p,
                      double hbar, std::span<double> out, Backend backend);

}  // namespace nhc::kernels
