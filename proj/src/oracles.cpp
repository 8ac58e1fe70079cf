#include "nhc/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nhc/errors.hpp"

namespace nhc {

namespace {

double grid_l2(const std::vector<cplx>& v, double dx) {
  double acc = 0.0;
  for (const cplx& x : v) acc += std::norm(x);
  return std::sqrt(acc * dx);
}

void check_boundary(const WaveFunction& psi) {
  double peak = 0.0;
  for (const cplx& v : psi.values) peak = std::max(peak, std::abs(v));
  const std::size_t N = psi.values.size();
  const auto edge = std::max<std::size_t>(1, static_cast<std::size_t>(0.05 * static_cast<double>(N)));
  double worst = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    worst = std::max({worst, std::abs(psi.values[i]), std::abs(psi.values[N - 1 - i])});
  }
  if (peak > 0.0 && worst > 1e-6 * peak) {
    std::ostringstream os;
    os << "wavefunction reaches " << worst / peak
       << " of its peak within 5% of the box edge; widen the grid";
    throw Error(ErrorKind::resolution, os.str());
  }
}

RealTrajectory real_closed_form(const RealTrajectory& like,
                                const std::function<RealSample(double)>& f) {
  RealTrajectory out{like.n, {}, std::nullopt};
  out.samples.reserve(like.samples.size());
  for (const RealSample& s : like.samples) out.samples.push_back(f(s.t));
  return out;
}

struct Gap {
  double Z = 0.0, G = 0.0, beta = 0.0;
};

Gap real_gap(const RealTrajectory& a, const RealTrajectory& b, double t_max) {
  Gap g;
  const std::size_t m = std::min(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (a.samples[k].t > t_max) break;
    g.Z = std::max(g.Z, (a.samples[k].Z - b.samples[k].Z).cwiseAbs().maxCoeff());
    g.G = std::max(g.G, (a.samples[k].G - b.samples[k].G).cwiseAbs().maxCoeff());
    g.beta = std::max(g.beta, std::abs(a.samples[k].beta - b.samples[k].beta));
  }
  return g;
}

constexpr double kEveryTime = std::numeric_limits<double>::infinity();

double breakdown_time(const std::optional<BreakdownReport>& r) {
  return r ? r->t_breakdown : std::numeric_limits<double>::quiet_NaN();
}

double beta_weight(NormConvention c) { return c == NormConvention::literal ? 2.0 : 1.0; }
double linear_weight(NormConvention c) { return c == NormConvention::literal ? 1.0 : 2.0; }

void run_contraction(const ExampleSpec& s, double t1, const EvolutionOptions& opts,
                     ExampleResult& r) {
  const QuadraticHamiltonian ham = example_hamiltonian(s);
  const Metric G0(s.G0);
  r.numeric_real = integrate_real_path(s.Z0, G0, ham, 0.0, t1, opts);

  const bool commuting = (s.S * s.G0 - s.G0 * s.S).cwiseAbs().maxCoeff() <= 1e-12;
  const RMat G0inv_S = G0.inverse() * s.S;
  r.closed_real = real_closed_form(*r.numeric_real, [&](double t) {
    const double th = std::tanh(s.gamma * t);
    const RMat num = s.G0 + th * s.S;
    const RMat den = th * s.G0 + s.S;
    RMat G = num * den.inverse() * s.S;
    G = 0.5 * (G + G.transpose()).eval();
    RealSample out{t, RVec::Constant(2, std::numeric_limits<double>::quiet_NaN()), G, 0.0};
    if (commuting) {
      const RMat W = std::cosh(s.gamma * t) * RMat::Identity(2, 2) + std::sinh(s.gamma * t) * G0inv_S;
      out.Z = W.partialPivLu().solve(s.Z0);
    }
    return out;
  });
  const Gap g = real_gap(*r.numeric_real, *r.closed_real, kEveryTime);
  r.deviations.emplace_back("G", g.G);
  if (commuting) r.deviations.emplace_back("Z", g.Z);

  const ShapeMatrix B0 = shape_from_metric(G0);
  r.numeric_complex = integrate_complex_path(s.Z0.cast<cplx>(), B0, ham, 0.0, t1, opts);
  const RealTrajectory projected = project_trajectory(*r.numeric_complex, opts.hbar);
  const Gap gp = real_gap(projected, *r.closed_real, kEveryTime);
  r.deviations.emplace_back("G_projected", gp.G);
  if (commuting) r.deviations.emplace_back("Z_projected", gp.Z);

  // Backward continuation: the closed form is singular where det(tanh(gamma t) G0 + S) = 0
  // for t < 0. Reversing time flips the sign of H.
  Eigen::GeneralizedSelfAdjointEigenSolver<RMat> ges(s.G0, s.S);
  double lambda = 0.0;
  for (Index i = 0; i < ges.eigenvalues().size(); ++i) lambda = std::max(lambda, ges.eigenvalues()(i));
  if (lambda > 1.0 + 1e-12) {
    const double t_sing = std::atanh(1.0 / lambda) / s.gamma;
    r.diagnostics.emplace_back("backward_singular_time_closed", t_sing);
    HamiltonianCoefficients k = ham.at(0.0);
    const QuadraticHamiltonian reversed(-k.H, -k.c, "reversed");
    EvolutionOptions back = opts;
    back.dt_sample = std::min(opts.dt_sample, 1e-2);
    const RealTrajectory rt = integrate_real_path(s.Z0, G0, reversed, 0.0, 2.0 * t_sing, back);
    r.diagnostics.emplace_back("backward_singular_time_numeric", breakdown_time(rt.breakdown));
  }
}

void run_blowup(const ExampleSpec& s, double t1, const EvolutionOptions& opts, ExampleResult& r) {
  const QuadraticHamiltonian ham = example_hamiltonian(s);
  const double b = s.b, Q0 = s.Q0, hbar = s.hbar;
  const ShapeMatrix B0(CMat::Constant(1, 1, cplx(0.0, b)));
  const PhasePoint z0 = (CVec(2) << 0.0, Q0).finished();
  r.numeric_complex = integrate_complex_path(z0, B0, ham, 0.0, t1, opts);
  const RealTrajectory projected = project_trajectory(*r.numeric_complex, hbar);
  r.numeric_real = integrate_real_path(z0.real(), metric_from_shape(B0), ham, 0.0, t1, opts);

  ComplexTrajectory cc{1, {}, std::nullopt};
  for (const ComplexSample& smp : r.numeric_complex->samples) {
    const double t = smp.t;
    ComplexSample c;
    c.t = t;
    c.z = (CVec(2) << cplx(0.0, -t * Q0), Q0).finished();
    c.B = CMat::Constant(1, 1, cplx(0.0, b - t));
    const double log_ratio = std::log((b - t) / b);
    c.alpha = cplx(0.0, -Q0 * Q0 * t / (2.0 * hbar) + 0.25 * log_ratio);
    cc.samples.push_back(std::move(c));
  }
  r.closed_complex = std::move(cc);

  auto real_at = [&](double t, double kappa) {
    RMat G = RMat::Zero(2, 2);
    G(0, 0) = 1.0 / (b - t);
    G(1, 1) = b - t;
    const RVec Z = (RVec(2) << 0.0, b * Q0 / (b - t)).finished();
    const double beta = -kappa * b * Q0 * Q0 * t / (hbar * (b - t)) + 0.5 * std::log((b - t) / b);
    return RealSample{t, Z, G, beta};
  };
  const double kappa = beta_weight(opts.norm);
  r.closed_real = real_closed_form(*r.numeric_real, [&](double t) { return real_at(t, kappa); });
  const RealTrajectory closed_true =
      real_closed_form(projected, [&](double t) { return real_at(t, 1.0); });

  // Compare up to 0.9 b, where the solution is O(10) and still well resolved.
  const double t_cmp = 0.9 * b + 1e-12;
  double dz = 0.0, dB = 0.0, da = 0.0;
  for (std::size_t k = 0; k < r.numeric_complex->samples.size(); ++k) {
    const ComplexSample& a = r.numeric_complex->samples[k];
    if (a.t > t_cmp) break;
    const ComplexSample& c = r.closed_complex->samples[k];
    dz = std::max(dz, (a.z - c.z).cwiseAbs().maxCoeff());
    dB = std::max(dB, (a.B - c.B).cwiseAbs().maxCoeff());
    da = std::max(da, std::abs(a.alpha - c.alpha));
  }
  r.deviations.emplace_back("z", dz);
  r.deviations.emplace_back("B", dB);
  r.deviations.emplace_back("alpha", da);
  const Gap gr = real_gap(*r.numeric_real, *r.closed_real, t_cmp);
  r.deviations.emplace_back("Z", gr.Z);
  r.deviations.emplace_back("G", gr.G);
  r.deviations.emplace_back("beta", gr.beta);
  const Gap gp = real_gap(projected, closed_true, t_cmp);
  r.deviations.emplace_back("Z_projected", gp.Z);
  r.deviations.emplace_back("beta_projected", gp.beta);

  r.diagnostics.emplace_back("breakdown_closed", b);
  r.diagnostics.emplace_back("breakdown_complex", breakdown_time(r.numeric_complex->breakdown));
  r.diagnostics.emplace_back("breakdown_real", breakdown_time(r.numeric_real->breakdown));
  if (t1 >= 0.9 * b) {
    for (const RealSample& smp : projected.samples) {
      if (std::abs(smp.t - 0.9 * b) < 1e-9) r.diagnostics.emplace_back("Q_at_0.9b", smp.Z(1));
    }
  }
}

void run_damped(const ExampleSpec& s, double t1, const EvolutionOptions& opts, ExampleResult& r) {
  const QuadraticHamiltonian ham = example_hamiltonian(s);
  const ShapeMatrix B(CMat::Constant(1, 1, I_unit * s.omega * s.delta));
  const Metric G = metric_from_shape(B);
  r.diagnostics.emplace_back("stationary_residual_B", stationary_residual(ham, B));
  r.diagnostics.emplace_back("stationary_residual_G", stationary_residual(ham, G));

  r.numeric_real = integrate_real_path(s.Z0, G, ham, 0.0, t1, opts);
  r.numeric_complex = integrate_complex_path(s.Z0.cast<cplx>(), B, ham, 0.0, t1, opts);

  const double w = s.omega, zeta = s.delta.imag();
  const double wd = w * std::sqrt(1.0 - zeta * zeta);
  const double P0 = s.Z0(0), Q0 = s.Z0(1);
  r.closed_real = real_closed_form(*r.numeric_real, [&](double t) {
    const double e = std::exp(-zeta * w * t), c = std::cos(wd * t), sn = std::sin(wd * t);
    const double Q = e * (Q0 * c + (P0 + zeta * w * Q0) / wd * sn);
    const double P = e * (P0 * c - (w * w * Q0 + zeta * w * P0) / wd * sn);
    return RealSample{t, (RVec(2) << P, Q).finished(), G.matrix(), 0.0};
  });
  const Gap g = real_gap(*r.numeric_real, *r.closed_real, kEveryTime);
  r.deviations.emplace_back("Z", g.Z);
  r.deviations.emplace_back("G", g.G);
  const Gap gp = real_gap(project_trajectory(*r.numeric_complex, opts.hbar), *r.closed_real, kEveryTime);
  r.deviations.emplace_back("Z_projected", gp.Z);
  r.deviations.emplace_back("G_projected", gp.G);

  r.diagnostics.emplace_back("ode_residual",
                             damped_oscillator_ode_residual(*r.numeric_real, s.omega, s.delta));
  int changes = 0;
  const auto& smp = r.numeric_real->samples;
  for (std::size_t k = 1; k < smp.size(); ++k) {
    const double a = smp[k - 1].Z(1), b = smp[k].Z(1);
    if ((a < 0.0) != (b < 0.0)) {
      ++changes;
      const double tz = smp[k - 1].t + (smp[k].t - smp[k - 1].t) * a / (a - b);
      r.diagnostics.emplace_back("zero_" + std::to_string(changes), tz);
    }
  }
  r.diagnostics.emplace_back("sign_changes", changes);
}

void run_pt_shifted(const ExampleSpec& s, double t1, const EvolutionOptions& opts,
                    ExampleResult& r) {
  const QuadraticHamiltonian ham = example_hamiltonian(s);
  const Metric G0(RMat::Identity(2, 2));
  r.numeric_real = integrate_real_path(s.Z0, G0, ham, 0.0, t1, opts);
  r.numeric_complex =
      integrate_complex_path(s.Z0.cast<cplx>(), shape_from_metric(G0), ham, 0.0, t1, opts);
  const RealTrajectory projected = project_trajectory(*r.numeric_complex, opts.hbar);

  const RVec& g = s.gamma_vec;
  auto at = [&](double t, double weight) {
    RMat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const RVec Z = g + R * (s.Z0 - g);
    return RealSample{t, Z, G0.matrix(), -weight / s.hbar * g.dot(Z - s.Z0)};
  };
  const double weight = linear_weight(opts.norm);
  r.closed_real = real_closed_form(*r.numeric_real, [&](double t) { return at(t, weight); });
  const Gap gr = real_gap(*r.numeric_real, *r.closed_real, kEveryTime);
  r.deviations.emplace_back("Z", gr.Z);
  r.deviations.emplace_back("G", gr.G);
  r.deviations.emplace_back("beta", gr.beta);
  const RealTrajectory closed_true =
      real_closed_form(projected, [&](double t) { return at(t, 2.0); });
  const Gap gp = real_gap(projected, closed_true, kEveryTime);
  r.deviations.emplace_back("Z_projected", gp.Z);
  r.deviations.emplace_back("beta_projected", gp.beta);

  const double radius = (s.Z0 - g).norm();
  double radial = 0.0;
  for (const RealSample& smp : r.numeric_real->samples) {
    radial = std::max(radial, std::abs((smp.Z - g).norm() - radius));
  }
  r.diagnostics.emplace_back("radius", radius);
  r.diagnostics.emplace_back("radius_deviation", radial);
  const RealSample& last = r.numeric_real->samples.back();
  r.diagnostics.emplace_back("closure", (last.Z - s.Z0).cwiseAbs().maxCoeff());
  r.diagnostics.emplace_back("beta_end", last.beta);
}

}  // namespace

WaveFunction weyl_apply_grid(const QuadraticHamiltonian& ham, double t, const WaveFunction& psi,
                             kernels::Backend backend) {
  if (ham.dimension() != 1) {
    throw Error(ErrorKind::dimension_mismatch, "grid operator supports n = 1 only");
  }
  if (psi.values.size() != psi.grid.points) {
    throw Error(ErrorKind::dimension_mismatch, "wavefunction does not match its grid");
  }
  check_boundary(psi);
  const HamiltonianCoefficients k = ham.at(t);
  const double h = psi.hbar;
  const cplx minus_i_h = -I_unit * h;
  kernels::QuadraticOperator op;
  op.d2 = -0.5 * h * h * k.H(0, 0);
  op.d1_const = minus_i_h * k.c(0);
  op.d1_lin = minus_i_h * k.H(1, 0);
  op.d0_const = 0.5 * minus_i_h * k.H(1, 0);
  op.d0_lin = k.c(1);
  op.d0_quad = 0.5 * k.H(1, 1);
  WaveFunction out{psi.grid, std::vector<cplx>(psi.values.size()), h};
  kernels::apply_quadratic_operator(psi.values, psi.grid.x_min, psi.grid.dx(), op, out.values,
                                    backend);
  return out;
}

ResidualReport schrodinger_residual(const ComplexTrajectory& ct, const QuadraticHamiltonian& ham,
                                    const GridSpec& grid, double hbar) {
  const auto& smp = ct.samples;
  if (smp.size() < 5) {
    throw Error(ErrorKind::invalid_argument, "residual needs at least 5 samples");
  }
  const double dt = smp[1].t - smp[0].t;
  for (std::size_t k = 1; k < smp.size(); ++k) {
    if (std::abs(smp[k].t - smp[k - 1].t - dt) > 1e-9 * std::max(1.0, std::abs(smp[k].t))) {
      throw Error(ErrorKind::invalid_argument, "residual needs uniformly spaced samples");
    }
  }
  std::vector<WaveFunction> psi;
  psi.reserve(smp.size());
  for (const ComplexSample& s : smp) {
    psi.push_back(evaluate_coherent_state(grid, s.z, ShapeMatrix(s.B), s.alpha, hbar));
  }
  ResidualReport rep;
  const double dx = grid.dx();
  std::vector<cplx> r(grid.points);
  for (std::size_t k = 2; k + 2 < smp.size(); ++k) {
    const WaveFunction Hpsi = weyl_apply_grid(ham, smp[k].t, psi[k]);
    for (std::size_t j = 0; j < grid.points; ++j) {
      const cplx dpsi = (psi[k - 2].values[j] - 8.0 * psi[k - 1].values[j] +
                         8.0 * psi[k + 1].values[j] - psi[k + 2].values[j]) /
                        (12.0 * dt);
      r[j] = I_unit * hbar * dpsi - Hpsi.values[j];
    }
    const double res = grid_l2(r, dx) / grid_l2(psi[k].values, dx);
    rep.times.push_back(smp[k].t);
    rep.residual_l2.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  return rep;
}

GridSpec covering_grid(const ComplexTrajectory& ct, double hbar, std::size_t points) {
  if (ct.n != 1 || ct.samples.empty()) {
    throw Error(ErrorKind::invalid_argument, "covering grid needs a non-empty 1-d trajectory");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const ComplexSample& s : ct.samples) {
    const ShapeMatrix B(s.B);
    const double Q = reduce_state(s.z, B).Z(1);
    const double w = 8.0 * std::sqrt(hbar / B.im()(0, 0));
    lo = std::min(lo, Q - w);
    hi = std::max(hi, Q + w);
  }
  GridSpec g{lo, hi, points};
  g.validate();
  return g;
}

WaveFunction propagate_on_grid(const WaveFunction& psi0, const QuadraticHamiltonian& ham,
                               double t0, double t1, double dt) {
  if (!(dt > 0.0) || t1 < t0) throw Error(ErrorKind::invalid_argument, "bad propagation interval");
  const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = steps ? (t1 - t0) / static_cast<double>(steps) : 0.0;
  const cplx f = -I_unit / psi0.hbar;
  WaveFunction psi = psi0, tmp = psi0;
  const std::size_t N = psi.values.size();
  auto rhs = [&](double t, const WaveFunction& in) {
    WaveFunction out = weyl_apply_grid(ham, t, in);
    for (cplx& v : out.values) v *= f;
    return out;
  };
  auto axpy = [&](const WaveFunction& base, double a, const WaveFunction& k) {
    for (std::size_t j = 0; j < N; ++j) tmp.values[j] = base.values[j] + a * k.values[j];
    return tmp;
  };
  double t = t0;
  for (std::size_t s = 0; s < steps; ++s) {
    const WaveFunction k1 = rhs(t, psi);
    const WaveFunction k2 = rhs(t + 0.5 * h, axpy(psi, 0.5 * h, k1));
    const WaveFunction k3 = rhs(t + 0.5 * h, axpy(psi, 0.5 * h, k2));
    const WaveFunction k4 = rhs(t + h, axpy(psi, h, k3));
    for (std::size_t j = 0; j < N; ++j) {
      psi.values[j] += h / 6.0 * (k1.values[j] + 2.0 * k2.values[j] + 2.0 * k3.values[j] + k4.values[j]);
    }
    t = t0 + static_cast<double>(s + 1) * h;
  }
  return psi;
}

WignerSamples wigner_transform_numeric(const WaveFunction& psi, const GridSpec& p_grid,
                                       kernels::Backend backend) {
  p_grid.validate();
  const double limit = std::numbers::pi * psi.hbar / (2.0 * psi.grid.dx());
  const double pmax = std::max(std::abs(p_grid.x_min), std::abs(p_grid.x_max));
  if (pmax > limit) {
    std::ostringstream os;
    os << "momentum range |p| <= " << pmax << " exceeds the alias-free bound pi hbar/(2 dx) = "
       << limit;
    throw Error(ErrorKind::aliasing, os.str());
  }
  WignerSamples w{psi.grid, p_grid, std::vector<double>(psi.grid.points * p_grid.points)};
  const std::vector<double> ps = p_grid.coordinates();
  kernels::wigner_transform(psi.values, psi.grid.dx(), ps, psi.hbar, w.values, backend);
  return w;
}

WignerSummary summarize(const WignerSamples& w) {
  const double cell = w.q_grid.dx() * w.p_grid.dx();
  double mass = 0.0, mp = 0.0, mq = 0.0, best = -std::numeric_limits<double>::infinity();
  RealPhasePoint peak = RVec::Zero(2);
  for (std::size_t i = 0; i < w.q_grid.points; ++i) {
    const double q = w.q_grid.x(i);
    for (std::size_t l = 0; l < w.p_grid.points; ++l) {
      const double p = w.p_grid.x(l);
      const double v = w.at(i, l);
      mass += v;
      mp += v * p;
      mq += v * q;
      if (v > best) {
        best = v;
        peak << p, q;
      }
    }
  }
  WignerSummary s;
  s.mass = mass * cell;
  s.centroid = (RVec(2) << mp / mass, mq / mass).finished();
  s.peak = peak;
  RMat cov = RMat::Zero(2, 2);
  for (std::size_t i = 0; i < w.q_grid.points; ++i) {
    const double dq = w.q_grid.x(i) - s.centroid(1);
    for (std::size_t l = 0; l < w.p_grid.points; ++l) {
      const double dp = w.p_grid.x(l) - s.centroid(0);
      const double v = w.at(i, l);
      cov(0, 0) += v * dp * dp;
      cov(0, 1) += v * dp * dq;
      cov(1, 1) += v * dq * dq;
    }
  }
  cov(1, 0) = cov(0, 1);
  s.covariance = cov / mass;
  return s;
}

std::string_view to_string(ExampleId id) {
  switch (id) {
    case ExampleId::contraction: return "contraction";
    case ExampleId::blowup: return "blowup";
    case ExampleId::damped_oscillator: return "damped_oscillator";
    case ExampleId::pt_shifted: return "pt_shifted";
  }
  return "unknown";
}

ExampleId example_id_from_string(std::string_view s) {
  for (ExampleId id : {ExampleId::contraction, ExampleId::blowup, ExampleId::damped_oscillator,
                       ExampleId::pt_shifted}) {
    if (s == to_string(id)) return id;
  }
  if (s == "1") return ExampleId::contraction;
  if (s == "2") return ExampleId::blowup;
  if (s == "3") return ExampleId::damped_oscillator;
  if (s == "4") return ExampleId::pt_shifted;
  throw Error(ErrorKind::config, "unknown example '" + std::string(s) +
                                     "' (contraction, blowup, damped_oscillator, pt_shifted)");
}

ExampleSpec ExampleSpec::defaults(ExampleId id) {
  ExampleSpec s;
  s.id = id;
  switch (id) {
    case ExampleId::contraction: s.Z0 << 1.0, 1.0; break;
    case ExampleId::damped_oscillator: s.Z0 << 0.0, 1.0; break;
    default: break;
  }
  return s;
}

void ExampleSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::invalid_argument, m); };
  if (!(hbar > 0.0) || !std::isfinite(hbar)) fail("hbar must be positive");
  if (Z0.size() != 2 || !Z0.allFinite()) fail("Z0 must be a finite 2-vector");
  switch (id) {
    case ExampleId::contraction: {
      if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("contraction: gamma must be positive");
      if (S.rows() != 2 || S.cols() != 2 || !S.allFinite()) fail("contraction: S must be 2x2");
      if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail("contraction: S must be symmetric");
      if (!is_positive_definite(S)) fail("contraction: S must be positive definite");
      if (!is_symplectic(S, 1e-10)) fail("contraction: S must be symplectic");
      if (G0.rows() != 2 || G0.cols() != 2) fail("contraction: G0 must be 2x2");
      try {
        Metric check(G0);
      } catch (const Error& e) {
        fail(std::string("contraction: G0 is not a metric: ") + e.what());
      }
      break;
    }
    case ExampleId::blowup:
      if (!(b > 0.0) || !std::isfinite(b)) fail("blowup: b must be positive");
      if (!std::isfinite(Q0)) fail("blowup: Q0 must be finite");
      break;
    case ExampleId::damped_oscillator:
      if (!(omega > 0.0) || !std::isfinite(omega)) fail("damped_oscillator: omega must be positive");
      if (std::abs(std::abs(delta) - 1.0) > 1e-12) fail("damped_oscillator: |delta| must be 1");
      if (!(delta.real() > 0.0)) fail("damped_oscillator: Re delta must be positive");
      if (!(delta.imag() > 0.0)) fail("damped_oscillator: Im delta must be positive");
      break;
    case ExampleId::pt_shifted:
      if (gamma_vec.size() != 2 || !gamma_vec.allFinite()) fail("pt_shifted: gamma must be a 2-vector");
      break;
  }
}

QuadraticHamiltonian example_hamiltonian(const ExampleSpec& s) {
  s.validate();
  switch (s.id) {
    case ExampleId::contraction:
      return QuadraticHamiltonian(CMat(-I_unit * s.gamma * s.S.cast<cplx>()), CVec(), "contraction");
    case ExampleId::blowup: {
      CMat H = CMat::Zero(2, 2);
      H(1, 1) = I_unit;
      return QuadraticHamiltonian(H, CVec(), "blowup");
    }
    case ExampleId::damped_oscillator: {
      CMat H = CMat::Zero(2, 2);
      H(0, 0) = std::conj(s.delta) * std::conj(s.delta);
      H(1, 1) = s.omega * s.omega;
      return QuadraticHamiltonian(H, CVec(), "damped_oscillator");
    }
    case ExampleId::pt_shifted: {
      const CVec c = I_unit * (omega_matrix(1).transpose() * s.gamma_vec).cast<cplx>();
      return QuadraticHamiltonian(CMat::Identity(2, 2), c, "pt_shifted");
    }
  }
  throw Error(ErrorKind::invalid_argument, "unknown example");
}

double ExampleResult::deviation(std::string_view name) const {
  for (const auto& [k, v] : deviations) {
    if (k == name) return v;
  }
  throw Error(ErrorKind::invalid_argument, "no deviation named " + std::string(name));
}

double ExampleResult::diagnostic(std::string_view name) const {
  for (const auto& [k, v] : diagnostics) {
    if (k == name) return v;
  }
  throw Error(ErrorKind::invalid_argument, "no diagnostic named " + std::string(name));
}

double ExampleResult::max_deviation() const {
  double m = 0.0;
  for (const auto& kv : deviations) m = std::max(m, kv.second);
  return m;
}

ExampleResult run_closed_form_example(const ExampleSpec& spec, double t1, const EvolutionOptions& opts) {
  spec.validate();
  if (!(t1 > 0.0)) throw Error(ErrorKind::invalid_argument, "example end time must be positive");
  EvolutionOptions o = opts;
  o.hbar = spec.hbar;
  ExampleResult r;
  r.id = spec.id;
  switch (spec.id) {
    case ExampleId::contraction: run_contraction(spec, t1, o, r); break;
    case ExampleId::blowup: run_blowup(spec, t1, o, r); break;
    case ExampleId::damped_oscillator: run_damped(spec, t1, o, r); break;
    case ExampleId::pt_shifted: run_pt_shifted(spec, t1, o, r); break;
  }
  return r;
}

double damped_oscillator_ode_residual(const RealTrajectory& traj, double omega, cplx delta) {
  const auto& s = traj.samples;
  if (s.size() < 5) throw Error(ErrorKind::invalid_argument, "ODE residual needs 5 samples");
  const double dt = s[1].t - s[0].t;
  const double damp = 2.0 * omega * delta.imag();
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < s.size(); ++k) {
    const double qm2 = s[k - 2].Z(1), qm1 = s[k - 1].Z(1), q0 = s[k].Z(1), qp1 = s[k + 1].Z(1),
                 qp2 = s[k + 2].Z(1);
    const double d1 = (qm2 - 8.0 * qm1 + 8.0 * qp1 - qp2) / (12.0 * dt);
    const double d2 = (-qm2 + 16.0 * qm1 - 30.0 * q0 + 16.0 * qp1 - qp2) / (12.0 * dt * dt);
    worst = std::max(worst, std::abs(d2 + damp * d1 + omega * omega * q0));
  }
  return worst;
}

NormAdjudication adjudicate_norm_convention(double t1) {
  CMat H(2, 2);
  H << cplx(1.0, -0.4), cplx(0.3, 0.1), cplx(0.3, 0.1), cplx(0.8, -0.3);
  const CVec c = (CVec(2) << cplx(0.2, -0.15), cplx(-0.1, -0.2)).finished();
  const QuadraticHamiltonian ham(H, c, "adjudication");
  const PhasePoint z0 = (CVec(2) << 0.3, -0.5).finished();
  const ShapeMatrix B0(CMat::Constant(1, 1, cplx(0.4, 1.1)));
  const double hbar = 1.0;

  EvolutionOptions opts;
  opts.hbar = hbar;
  opts.dt_sample = 1e-3;
  NormAdjudication out;

  EvolutionOptions nc = opts, pp = opts;
  nc.norm = NormConvention::norm_consistent;
  pp.norm = NormConvention::literal;
  const ComplexTrajectory ct_nc = integrate_complex_path(z0, B0, ham, 0.0, t1, nc);
  const ComplexTrajectory ct_pp = integrate_complex_path(z0, B0, ham, 0.0, t1, pp);
  const GridSpec grid = covering_grid(ct_nc, hbar);
  out.residual_norm_consistent = schrodinger_residual(ct_nc, ham, grid, hbar).max_residual;
  out.residual_literal = schrodinger_residual(ct_pp, ham, grid, hbar).max_residual;

  const Metric G0 = metric_from_shape(B0);
  const RealTrajectory rt_nc = integrate_real_path(z0.real(), G0, ham, 0.0, t1, nc);
  const RealTrajectory rt_pp = integrate_real_path(z0.real(), G0, ham, 0.0, t1, pp);
  const RealTrajectory pj_nc = project_trajectory(ct_nc, hbar);
  const RealTrajectory pj_pp = project_trajectory(ct_pp, hbar);

  WaveFunction psi = evaluate_coherent_state(grid, z0, B0, 0.0, hbar);
  const double n0 = psi.norm_squared();
  const std::size_t stride = 100;
  double t = 0.0;
  for (std::size_t k = stride; k < rt_nc.samples.size(); k += stride) {
    const double tk = rt_nc.samples[k].t;
    psi = propagate_on_grid(psi, ham, t, tk, 2e-4);
    t = tk;
    const double ratio = psi.norm_squared() / n0;
    auto err = [&](const RealTrajectory& tr) {
      return std::abs(std::exp(-tr.samples[k].beta) / ratio - 1.0);
    };
    out.beta_error_norm_consistent = std::max(out.beta_error_norm_consistent, err(rt_nc));
    out.beta_error_literal = std::max(out.beta_error_literal, err(rt_pp));
    out.alpha_norm_error_norm_consistent = std::max(out.alpha_norm_error_norm_consistent, err(pj_nc));
    out.alpha_norm_error_literal = std::max(out.alpha_norm_error_literal, err(pj_pp));
  }

  const double score_nc = out.residual_norm_consistent + out.beta_error_norm_consistent +
                          out.alpha_norm_error_norm_consistent;
  const double score_pp =
      out.residual_literal + out.beta_error_literal + out.alpha_norm_error_literal;
  out.verdict = score_nc <= score_pp ? NormConvention::norm_consistent : NormConvention::literal;
  std::ostringstream os;
  os << "residual nc=" << out.residual_norm_consistent << " literal=" << out.residual_literal
     << "; beta vs grid norm nc=" << out.beta_error_norm_consistent
     << " literal=" << out.beta_error_literal
     << "; alpha vs grid norm nc=" << out.alpha_norm_error_norm_consistent
     << " literal=" << out.alpha_norm_error_literal << "; verdict " << to_string(out.verdict);
  out.summary = os.str();
  return out;
}

}  // namespace nhc
