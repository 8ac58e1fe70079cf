#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include <omp.h>

#include "nhc/kernels.hpp"

using namespace nhc;
using namespace nhc::kernels;

namespace {

std::vector<double> grid(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
  return x;
}

}  // namespace

TEST_CASE("backends report OpenMP") {
  CHECK(openmp_available());
  CHECK(default_backend() == Backend::openmp);
  CHECK(max_threads() >= 1);
}

TEST_CASE("coherent_state value and bitwise backend agreement") {
  const auto x = grid(-6.0, 6.0, 1001);
  std::vector<cplx> s(x.size()), p(x.size());
  omp_set_num_threads(4);
  coherent_state(x, cplx(0.3, 0.1), cplx(0.5, -0.2), cplx(0.4, 1.3), cplx(0.7, 0.2), 0.8, s, Backend::serial);
  coherent_state(x, cplx(0.3, 0.1), cplx(0.5, -0.2), cplx(0.4, 1.3), cplx(0.7, 0.2), 0.8, p, Backend::openmp);
  CHECK(s == p);
  const double xj = x[600];
  const cplx d = xj - cplx(0.5, -0.2);
  const cplx expected = cplx(0.7, 0.2) * std::exp(I_unit / 0.8 * (cplx(0.3, 0.1) * d + 0.5 * cplx(0.4, 1.3) * d * d));
  CHECK(std::abs(s[600] - expected) < 1e-14);
}

TEST_CASE("wigner_gaussian value and agreement") {
  const std::size_t m = 40;
  std::vector<double> pts;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      pts.push_back(-3.0 + 0.15 * static_cast<double>(i));
      pts.push_back(-3.0 + 0.15 * static_cast<double>(j));
    }
  const RVec Z = (RVec(2) << 0.2, -0.1).finished();
  const RMat G = (RMat(2, 2) << 1.0, -1.0, -1.0, 2.0).finished();
  std::vector<double> s(m * m), p(m * m);
  wigner_gaussian(pts, Z, G, 0.5, 1.0, s, Backend::serial);
  wigner_gaussian(pts, Z, G, 0.5, 1.0, p, Backend::openmp);
  CHECK(s == p);
  const RVec d = (RVec(2) << pts[2 * 77] - Z(0), pts[2 * 77 + 1] - Z(1)).finished();
  CHECK(s[77] == doctest::Approx(0.5 * std::exp(-d.dot(G * d))).epsilon(1e-14));
}

TEST_CASE("apply_quadratic_operator: second derivative of a Gaussian") {
  const auto x = grid(-10.0, 10.0, 801);
  const double dx = x[1] - x[0];
  std::vector<cplx> f(x.size()), s(x.size()), p(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) f[j] = std::exp(-x[j] * x[j] / 2.0);
  QuadraticOperator op;
  op.d2 = -0.5;
  op.d0_quad = 0.5;
  apply_quadratic_operator(f, x.front(), dx, op, s, Backend::serial);
  apply_quadratic_operator(f, x.front(), dx, op, p, Backend::openmp);
  CHECK(s == p);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < x.size(); ++j) worst = std::max(worst, std::abs(s[j] - 0.5 * f[j]));
  CHECK(worst < 1e-5);
}

TEST_CASE("apply_quadratic_operator: linear terms") {
  const auto x = grid(-10.0, 10.0, 801);
  const double dx = x[1] - x[0];
  std::vector<cplx> f(x.size()), out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) f[j] = std::exp(-x[j] * x[j] / 2.0);
  QuadraticOperator op;
  op.d1_lin = 1.0;   // x f' = -x^2 f
  op.d0_lin = 2.0;   // + 2 x f
  op.d0_const = 1.0;
  apply_quadratic_operator(f, x.front(), dx, op, out, Backend::serial);
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < x.size(); ++j) {
    worst = std::max(worst, std::abs(out[j] - (1.0 + 2.0 * x[j] - x[j] * x[j]) * f[j]));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("wigner_transform of the standard Gaussian") {
  const auto x = grid(-8.0, 8.0, 512);
  const double dx = x[1] - x[0];
  std::vector<cplx> psi(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) psi[j] = std::pow(std::numbers::pi, -0.25) * std::exp(-x[j] * x[j] / 2.0);
  const auto p = grid(-4.0, 4.0, 81);
  std::vector<double> s(x.size() * p.size()), o(x.size() * p.size());
  wigner_transform(psi, dx, p, 1.0, s, Backend::serial);
  wigner_transform(psi, dx, p, 1.0, o, Backend::openmp);
  CHECK(s == o);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t l = 0; l < p.size(); ++l) {
      const double exact = std::exp(-x[k] * x[k] - p[l] * p[l]) / std::numbers::pi;
      worst = std::max(worst, std::abs(s[k * p.size() + l] - exact));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("size mismatches are rejected") {
  const auto x = grid(-1.0, 1.0, 16);
  std::vector<cplx> out(8);
  CHECK_THROWS(coherent_state(x, 0.0, 0.0, I_unit, 1.0, 1.0, out, Backend::serial));
}
