#include "nhc/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nhc/errors.hpp"

namespace nhc {

void GridSpec::validate() const {
  if (points < 16) throw Error(ErrorKind::invalid_argument, "grid needs at least 16 points");
  if (!(x_max > x_min)) throw Error(ErrorKind::invalid_argument, "grid needs x_max > x_min");
}

std::vector<double> GridSpec::coordinates() const {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i) xs[i] = x(i);
  return xs;
}

GridSpec GridSpec::centred(double centre, double half_width, std::size_t points) {
  GridSpec g{centre - half_width, centre + half_width, points};
  g.validate();
  return g;
}

GridSpec validation_grid(double Q, const ShapeMatrix& B, double hbar, std::size_t points) {
  if (B.dimension() != 1) throw Error(ErrorKind::dimension_mismatch, "grid sampling is 1-d");
  return GridSpec::centred(Q, 8.0 * std::sqrt(hbar / B.im()(0, 0)), points);
}

double WaveFunction::norm_squared() const {
  if (values.empty()) return 0.0;
  double acc = 0.5 * (std::norm(values.front()) + std::norm(values.back()));
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += std::norm(values[i]);
  return acc * grid.dx();
}

WaveFunction evaluate_coherent_state(const GridSpec& grid, const PhasePoint& z,
                                     const ShapeMatrix& B, cplx alpha, double hbar,
                                     kernels::Backend backend) {
  grid.validate();
  if (B.dimension() != 1 || z.size() != 2) {
    throw Error(ErrorKind::dimension_mismatch, "wavefunction sampling supports n = 1 only");
  }
  if (!(hbar > 0.0)) throw Error(ErrorKind::invalid_argument, "hbar must be positive");
  const double im_b = B.im()(0, 0);
  const double width = std::sqrt(hbar / im_b);
  if (width / grid.dx() < 8.0) {
    std::ostringstream os;
    os << "grid spacing " << grid.dx() << " resolves sqrt(hbar/Im B) = " << width << " with only "
       << width / grid.dx() << " points";
    throw Error(ErrorKind::resolution, os.str());
  }
  const cplx prefactor =
      std::exp(I_unit * alpha) * std::pow(im_b, 0.25) / std::pow(std::numbers::pi * hbar, 0.25);
  WaveFunction psi{grid, std::vector<cplx>(grid.points), hbar};
  const std::vector<double> xs = grid.coordinates();
  kernels::coherent_state(xs, z(0), z(1), B.matrix()(0, 0), prefactor, hbar, psi.values, backend);
  return psi;
}

std::vector<double> evaluate_wigner_gaussian(const std::vector<RealPhasePoint>& points,
                                             const WignerGaussian& w, kernels::Backend backend) {
  const Index dim = w.Z.size();
  if (dim != w.G.matrix().rows()) {
    throw Error(ErrorKind::dimension_mismatch, "Wigner centre and metric differ in size");
  }
  std::vector<double> flat;
  flat.reserve(points.size() * static_cast<std::size_t>(dim));
  for (const RealPhasePoint& z : points) {
    if (z.size() != dim) throw Error(ErrorKind::dimension_mismatch, "evaluation point size");
    flat.insert(flat.end(), z.data(), z.data() + dim);
  }
  const double amplitude =
      std::exp(-w.beta) / std::pow(std::numbers::pi * w.hbar, static_cast<double>(dim / 2));
  std::vector<double> out(points.size());
  kernels::wigner_gaussian(flat, w.Z, w.G.matrix(), amplitude, w.hbar, out, backend);
  return out;
}

Moments moments(const WignerGaussian& w) {
  return {std::exp(-w.beta), w.Z, 0.5 * w.hbar * w.G.inverse()};
}

double norm_consistency(cplx alpha, cplx sigma, double beta, double hbar) {
  return std::abs(beta - 2.0 * alpha.imag() - 2.0 * sigma.imag() / hbar);
}

}  // namespace nhc
