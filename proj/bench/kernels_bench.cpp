// Serial reference vs OpenMP for the grid kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nhc/kernels.hpp"

namespace {

using nhc::cplx;
using nhc::kernels::Backend;

std::vector<double> grid(std::size_t n, double half) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = -half + 2.0 * half * static_cast<double>(j) / static_cast<double>(n - 1);
  return x;
}

std::vector<cplx> gaussian(const std::vector<double>& x) {
  std::vector<cplx> psi(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) psi[j] = std::exp(cplx(-0.5 * x[j] * x[j], 0.3 * x[j]));
  return psi;
}

Backend backend(const benchmark::State& s) { return s.range(1) == 0 ? Backend::serial : Backend::openmp; }

void label(benchmark::State& s) { s.SetLabel(s.range(1) == 0 ? "serial" : "openmp"); }

void BM_CoherentState(benchmark::State& state) {
  const auto x = grid(static_cast<std::size_t>(state.range(0)), 8.0);
  std::vector<cplx> out(x.size());
  for (auto _ : state) {
    nhc::kernels::coherent_state(x, cplx(0.3, 0.1), cplx(0.2, -0.1), cplx(0.4, 1.2), 1.0, 1.0, out, backend(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  label(state);
}

void BM_WignerGaussian(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto axis = grid(side, 5.0);
  std::vector<double> pts;
  pts.reserve(2 * side * side);
  for (double p : axis)
    for (double q : axis) {
      pts.push_back(p);
      pts.push_back(q);
    }
  const nhc::RVec Z = (nhc::RVec(2) << 0.2, -0.1).finished();
  const nhc::RMat G = (nhc::RMat(2, 2) << 1.0, -1.0, -1.0, 2.0).finished();
  std::vector<double> out(side * side);
  for (auto _ : state) {
    nhc::kernels::wigner_gaussian(pts, Z, G, 1.0, 1.0, out, backend(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
  label(state);
}

void BM_QuadraticOperator(benchmark::State& state) {
  const auto x = grid(static_cast<std::size_t>(state.range(0)), 10.0);
  const auto psi = gaussian(x);
  std::vector<cplx> out(x.size());
  nhc::kernels::QuadraticOperator op;
  op.d2 = -0.5;
  op.d1_lin = cplx(0.0, -0.3);
  op.d0_quad = cplx(0.5, -0.1);
  for (auto _ : state) {
    nhc::kernels::apply_quadratic_operator(psi, x.front(), x[1] - x[0], op, out, backend(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  label(state);
}

void BM_WignerTransform(benchmark::State& state) {
  const auto x = grid(static_cast<std::size_t>(state.range(0)), 8.0);
  const auto psi = gaussian(x);
  const auto p = grid(128, 4.0);
  std::vector<double> out(x.size() * p.size());
  for (auto _ : state) {
    nhc::kernels::wigner_transform(psi, x[1] - x[0], p, 1.0, out, backend(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
  label(state);
}

}  // namespace

BENCHMARK(BM_CoherentState)->ArgsProduct({{4096, 65536}, {0, 1}});
BENCHMARK(BM_WignerGaussian)->ArgsProduct({{128, 512}, {0, 1}});
BENCHMARK(BM_QuadraticOperator)->ArgsProduct({{4096, 65536}, {0, 1}});
BENCHMARK(BM_WignerTransform)->ArgsProduct({{256, 512}, {0, 1}});

BENCHMARK_MAIN();
