#include "nhc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nhc/errors.hpp"

namespace nhc::kernels {

Backend default_backend() noexcept {
  return openmp_available() ? Backend::openmp : Backend::serial;
}

bool openmp_available() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

using std::ptrdiff_t;

inline cplx coherent_value(double x, cplx p, cplx q, cplx B, cplx prefactor, double hbar) {
  const cplx d = x - q;
  return prefactor * std::exp(I_unit / hbar * (p * d + 0.5 * B * d * d));
}

inline double gaussian_value(const double* z, const RVec& Z, const RMat& G, double amplitude,
                             double hbar) {
  const Index dim = Z.size();
  double quad = 0.0;
  for (Index a = 0; a < dim; ++a) {
    const double da = z[a] - Z(a);
    double row = 0.0;
    for (Index b = 0; b < dim; ++b) row += G(a, b) * (z[b] - Z(b));
    quad += da * row;
  }
  return amplitude * std::exp(-quad / hbar);
}

inline cplx stencil_value(std::span<const cplx> psi, ptrdiff_t j, double x, double dx,
                          const QuadraticOperator& op) {
  const auto N = static_cast<ptrdiff_t>(psi.size());
  auto at = [&](ptrdiff_t i) { return (i < 0 || i >= N) ? cplx(0.0) : psi[i]; };
  const cplx fm2 = at(j - 2), fm1 = at(j - 1), f0 = at(j), fp1 = at(j + 1), fp2 = at(j + 2);
  const cplx d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dx);
  const cplx d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * dx * dx);
  return op.d2 * d2 + (op.d1_const + op.d1_lin * x) * d1 +
         (op.d0_const + op.d0_lin * x + op.d0_quad * x * x) * f0;
}

// One row k of the Wigner transform. Terms with |f_m| below 1e-17 of the peak
// density are dropped past the last significant lag.
inline void wigner_row(std::span<const cplx> psi, ptrdiff_t k, double dx,
                       std::span<const double> p, double hbar, double cutoff, double* row,
                       std::vector<cplx>& f) {
  const auto N = static_cast<ptrdiff_t>(psi.size());
  const ptrdiff_t m_max = std::min(k, N - 1 - k);
  f.assign(static_cast<std::size_t>(m_max + 1), cplx(0.0));
  ptrdiff_t last = 0;
  for (ptrdiff_t m = 0; m <= m_max; ++m) {
    f[m] = std::conj(psi[k + m]) * psi[k - m];
    if (std::abs(f[m]) > cutoff) last = m;
  }
  const double scale = dx / (std::numbers::pi * hbar);
  for (std::size_t l = 0; l < p.size(); ++l) {
    const cplx step = std::exp(2.0 * I_unit * p[l] * dx / hbar);
    cplx phase = step;
    cplx acc = 0.0;
    for (ptrdiff_t m = 1; m <= last; ++m) {
      acc += f[m] * phase;
      phase *= step;
    }
    row[l] = scale * (f[0].real() + 2.0 * acc.real());
  }
}

double wigner_cutoff(std::span<const cplx> psi) {
  double peak = 0.0;
  for (const cplx& v : psi) peak = std::max(peak, std::norm(v));
  return 1e-17 * peak;
}

}  // namespace

void coherent_state(std::span<const double> x, cplx p, cplx q, cplx B, cplx prefactor,
                    double hbar, std::span<cplx> out, Backend backend) {
  if (out.size() != x.size()) throw Error(ErrorKind::dimension_mismatch, "output size");
  const auto N = static_cast<ptrdiff_t>(x.size());
  if (backend == Backend::serial) {
    for (ptrdiff_t j = 0; j < N; ++j) out[j] = coherent_value(x[j], p, q, B, prefactor, hbar);
    return;
  }
#pragma omp parallel for schedule(static)
  for (ptrdiff_t j = 0; j < N; ++j) out[j] = coherent_value(x[j], p, q, B, prefactor, hbar);
}

void wigner_gaussian(std::span<const double> points, const RVec& Z, const RMat& G,
                     double amplitude, double hbar, std::span<double> out, Backend backend) {
  const auto dim = static_cast<std::size_t>(Z.size());
  if (dim == 0 || points.size() != dim * out.size() || G.rows() != Z.size() ||
      G.cols() != Z.size()) {
    throw Error(ErrorKind::dimension_mismatch, "wigner_gaussian: inconsistent sizes");
  }
  const auto K = static_cast<ptrdiff_t>(out.size());
  if (backend == Backend::serial) {
    for (ptrdiff_t k = 0; k < K; ++k)
      out[k] = gaussian_value(points.data() + k * dim, Z, G, amplitude, hbar);
    return;
  }
#pragma omp parallel for schedule(static)
  for (ptrdiff_t k = 0; k < K; ++k)
    out[k] = gaussian_value(points.data() + k * dim, Z, G, amplitude, hbar);
}

void apply_quadratic_operator(std::span<const cplx> psi, double x0, double dx,
                              const QuadraticOperator& op, std::span<cplx> out, Backend backend) {
  if (out.size() != psi.size()) throw Error(ErrorKind::dimension_mismatch, "output size");
  const auto N = static_cast<ptrdiff_t>(psi.size());
  if (backend == Backend::serial) {
    for (ptrdiff_t j = 0; j < N; ++j) out[j] = stencil_value(psi, j, x0 + j * dx, dx, op);
    return;
  }
#pragma omp parallel for schedule(static)
  for (ptrdiff_t j = 0; j < N; ++j) out[j] = stencil_value(psi, j, x0 + j * dx, dx, op);
}

void wigner_transform(std::span<const cplx> psi, double dx, std::span<const double> p,
                      double hbar, std::span<double> out, Backend backend) {
  if (out.size() != psi.size() * p.size()) {
    throw Error(ErrorKind::dimension_mismatch, "wigner_transform: output size");
  }
  const auto N = static_cast<ptrdiff_t>(psi.size());
  const double cutoff = wigner_cutoff(psi);
  if (backend == Backend::serial) {
    std::vector<cplx> f;
    for (ptrdiff_t k = 0; k < N; ++k)
      wigner_row(psi, k, dx, p, hbar, cutoff, out.data() + k * p.size(), f);
    return;
  }
#pragma omp parallel
  {
    std::vector<cplx> f;
#pragma omp for schedule(dynamic, 8)
    for (ptrdiff_t k = 0; k < N; ++k)
      wigner_row(psi, k, dx, p, hbar, cutoff, out.data() + k * p.size(), f);
  }
}

}  // namespace nhc::kernels
