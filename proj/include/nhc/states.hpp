#pragma once

#include <cstddef>
#include <vector>

#include "nhc/geometry.hpp"
#include "nhc/kernels.hpp"

namespace nhc {

/// Uniform 1-d grid x_i = x_min + i dx, i = 0..points-1, endpoints included.
struct GridSpec {
  double x_min = -8.0;
  double x_max = 8.0;
  std::size_t points = 512;

  /// Throws Error(invalid_argument) unless points >= 16 and x_max > x_min.
  void validate() const;
  double dx() const { return (x_max - x_min) / static_cast<double>(points - 1); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  std::vector<double> coordinates() const;

  /// Grid spanning centre +- half_width.
  static GridSpec centred(double centre, double half_width, std::size_t points = 512);
};

/// Default validation grid: Q +- 8 sqrt(hbar / Im B), 512 points.
GridSpec validation_grid(double Q, const ShapeMatrix& B, double hbar, std::size_t points = 512);

struct WaveFunction {
  GridSpec grid;
  std::vector<cplx> values;
  double hbar = 1.0;

  /// Trapezoid-rule integral of |psi|^2.
  double norm_squared() const;
};

struct WignerGaussian {
  RealPhasePoint Z;
  Metric G;
  double beta = 0.0;
  double hbar = 1.0;
};

/// e^{i alpha} (det Im B)^{1/4} (pi hbar)^{-1/4} exp{(i/hbar)[p(x-q) + 1/2 B (x-q)^2]}
/// for n = 1. Throws Error(resolution) with fewer than 8 grid points per
/// sqrt(hbar / Im B).
WaveFunction evaluate_coherent_state(const GridSpec& grid, const PhasePoint& z,
                                     const ShapeMatrix& B, cplx alpha, double hbar,
                                     kernels::Backend backend = kernels::default_backend());

/// e^{-beta} (pi hbar)^{-n} exp{-(z - Z).G(z - Z)/hbar} at each point.
std::vector<double> evaluate_wigner_gaussian(const std::vector<RealPhasePoint>& points,
                                             const WignerGaussian& w,
                                             kernels::Backend backend = kernels::default_backend());

struct Moments {
  double norm_sq = 0.0;
  RealPhasePoint mean;
  RMat covariance;
};

/// norm e^{-beta}, mean Z, covariance (hbar/2) G^{-1}.
Moments moments(const WignerGaussian& w);

/// |beta - 2 Im alpha - 2 Im sigma / hbar|; zero when the Wigner log-norm
/// matches the complex-route bookkeeping.
double norm_consistency(cplx alpha, cplx sigma, double beta, double hbar);

}  // namespace nhc
