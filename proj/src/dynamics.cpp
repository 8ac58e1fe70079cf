#include "nhc/dynamics.hpp"

#include <sstream>

namespace nhc {

std::string_view to_string(NormConvention c) {
  switch (c) {
    case NormConvention::norm_consistent: return "norm_consistent";
    case NormConvention::literal: return "literal";
  }
  return "unknown";
}

NormConvention norm_convention_from_string(std::string_view s) {
  if (s == "norm_consistent") return NormConvention::norm_consistent;
  if (s == "literal") return NormConvention::literal;
  throw Error(ErrorKind::invalid_argument,
              "unknown norm convention '" + std::string(s) + "' (norm_consistent|literal)");
}

std::string_view to_string(BreakdownReason r) {
  switch (r) {
    case BreakdownReason::positivity_loss: return "positivity-loss";
    case BreakdownReason::step_failure: return "step-failure";
    case BreakdownReason::provider_failure: return "provider-failure";
  }
  return "unknown";
}

namespace {

template <class Vector>
struct MonitoredRun {
  std::vector<double> times;
  std::vector<Vector> states;
  std::optional<BreakdownReport> breakdown;
};

// Integrates through the sample times, stopping at the first state the monitor
// rejects or the first integrator failure. The breakdown time is bracketed by
// bisection from the last good state.
template <class Vector>
MonitoredRun<Vector> run_monitored(typename DormandPrince<Vector>::Rhs rhs,
                                   typename DormandPrince<Vector>::PostStep post,
                                   typename DormandPrince<Vector>::Monitor monitor,
                                   std::function<double(const Vector&)> min_eig,
                                   const Vector& y0, const std::vector<double>& times,
                                   IntegratorOptions opts, double bracket) {
  MonitoredRun<Vector> run;
  double t = times.front();
  Vector y = y0;
  run.times.push_back(t);
  run.states.push_back(y);

  DormandPrince<Vector> stepper(rhs, opts, post, monitor);
  double t_bad = t;
  bool positivity = false;
  bool provider = false;
  std::string detail;
  bool failed = false;
  for (std::size_t k = 1; k < times.size() && !failed; ++k) {
    StepStatus st;
    try {
      st = stepper.advance(t, y, times[k]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::provider_failure) throw;
      BreakdownReport report{t, min_eig(y), BreakdownReason::provider_failure, e.what()};
      run.breakdown = report;
      return run;
    }
    if (st == StepStatus::ok) {
      run.times.push_back(t);
      run.states.push_back(y);
      continue;
    }
    failed = true;
    detail = to_string(st);
    positivity = st == StepStatus::monitor_stop;
    t_bad = positivity ? stepper.bad_time() : (st == StepStatus::non_finite ? t : times[k]);
  }
  if (!failed) return run;

  // Bracket [t_a, t_b]: t_a admissible, t_b known bad.
  double t_a = t;
  Vector y_a = y;
  double t_b = std::max(t_bad, t_a);
  while (t_b - t_a > bracket) {
    const double mid = 0.5 * (t_a + t_b);
    DormandPrince<Vector> probe(rhs, opts, post, monitor);
    double tp = t_a;
    Vector yp = y_a;
    StepStatus st;
    try {
      st = probe.advance(tp, yp, mid);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::provider_failure) throw;
      provider = true;
      detail = e.what();
      t_b = mid;
      continue;
    }
    if (st == StepStatus::ok) {
      t_a = mid;
      y_a = yp;
    } else if (st == StepStatus::monitor_stop) {
      positivity = true;
      t_a = tp;
      y_a = yp;
      t_b = probe.bad_time();
    } else if (st == StepStatus::non_finite) {
      t_b = tp > t_a ? tp : mid;
    } else {
      t_a = tp;
      y_a = yp;
      t_b = mid;
    }
  }
  BreakdownReport report;
  report.t_breakdown = 0.5 * (t_a + t_b);
  report.min_eig = min_eig(y_a);
  report.reason = positivity ? BreakdownReason::positivity_loss
                  : provider ? BreakdownReason::provider_failure
                             : BreakdownReason::step_failure;
  report.detail = detail;
  run.breakdown = report;
  return run;
}

IntegratorOptions capped(IntegratorOptions opts, double dt) {
  opts.max_step = std::min(opts.max_step, dt);
  return opts;
}

void require_status(StepStatus st, double t, const char* what) {
  if (st == StepStatus::ok) return;
  std::ostringstream os;
  os << what << " failed at t=" << t << ": " << to_string(st);
  throw Error(ErrorKind::step_failure, os.str());
}

// Complex route state: z (2n) | B column-major (n^2) | alpha.
struct ComplexLayout {
  Index n;
  Index size() const { return 2 * n + n * n + 1; }
  Index b_offset() const { return 2 * n; }
  Index alpha_offset() const { return 2 * n + n * n; }
};

// Real route state: Z (2n) | G column-major (4n^2) | beta.
struct RealLayout {
  Index n;
  Index size() const { return 2 * n + 4 * n * n + 1; }
  Index g_offset() const { return 2 * n; }
  Index beta_offset() const { return 2 * n + 4 * n * n; }
};

}  // namespace

CMat shape_rhs(const HamiltonianCoefficients& k, const CMat& B) {
  const auto h = split_blocks<CMat>(k.H);
  return -h.qq - h.qp * B - B * h.pq - B * h.pp * B;
}

RMat metric_rhs(const HamiltonianCoefficients& k, const RMat& G) {
  const Index n = G.rows() / 2;
  const RMat omega = omega_matrix(n);
  const RMat reH = k.H.real();
  const RMat imH = k.H.imag();
  return reH * omega * G - G * omega * reH - imH + G * omega.transpose() * imH * omega * G;
}

FlowMatrix integrate_flow(const QuadraticHamiltonian& ham, double t0, double t1,
                          const IntegratorOptions& opts) {
  return integrate_flow_samples(ham, t0, {t1}, opts).back();
}

std::vector<FlowMatrix> integrate_flow_samples(const QuadraticHamiltonian& ham, double t0,
                                               const std::vector<double>& times,
                                               const IntegratorOptions& opts) {
  const Index n = ham.dimension();
  const Index m = 2 * n;
  const CMat omega = omega_matrix(n).cast<cplx>();
  auto rhs = [&](double t, const CVec& y, CVec& dy) {
    dy.resize(y.size());
    Eigen::Map<const CMat> S(y.data(), m, m);
    Eigen::Map<CMat> dS(dy.data(), m, m);
    dS = omega * ham.at(t).H * S;
  };
  CVec y = CMat::Identity(m, m).reshaped();
  DormandPrince<CVec> stepper(rhs, opts);
  double t = t0;
  std::vector<FlowMatrix> out;
  out.reserve(times.size());
  for (double target : times) {
    if (target < t) throw Error(ErrorKind::invalid_argument, "flow sample times must ascend from t0");
    require_status(stepper.advance(t, y, target), t, "flow integration");
    out.push_back({y.reshaped(m, m), target});
  }
  return out;
}

ShapeMatrix mobius_shape(const FlowMatrix& S, const ShapeMatrix& B) {
  const CMat out = block_mobius<CMat>(S.S, B.matrix());
  try {
    return ShapeMatrix(0.5 * (out + out.transpose()));
  } catch (const Error& e) {
    throw Error(ErrorKind::positivity_loss, std::string("S L_B is not positive: ") + e.what());
  }
}

ComplexStructure transport_structure(const FlowMatrix& S, const ComplexStructure& J) {
  const RMat& j = J.matrix();
  if (S.S.rows() != j.rows()) {
    throw Error(ErrorKind::dimension_mismatch, "flow and complex structure differ in size");
  }
  const RMat A = S.S.real() - S.S.imag() * j;
  if (!(condition_number(A) <= kMaxCondition)) {
    throw Error(ErrorKind::transport_singularity, "Re S - Im S J is singular");
  }
  const RMat AJ = A * j;
  // A J A^{-1} = (A^{-T} (A J)^T)^T
  RMat out = A.transpose().partialPivLu().solve(AJ.transpose()).transpose();
  return ComplexStructure(std::move(out), 1e-8);
}

Metric transport_metric(const FlowMatrix& S, const Metric& G) {
  const ComplexStructure J = transport_structure(S, structure_from_metric(G));
  RMat g = omega_matrix(G.dimension()) * J.matrix();
  g = 0.5 * (g + g.transpose()).eval();
  return Metric(std::move(g), 1e-8);
}

DoubledFlow doubled_flow(const QuadraticHamiltonian& ham, double t0, double t1,
                         const IntegratorOptions& opts) {
  return doubled_flow_samples(ham, t0, {t1}, opts).back();
}

std::vector<DoubledFlow> doubled_flow_samples(const QuadraticHamiltonian& ham, double t0,
                                              const std::vector<double>& times,
                                              const IntegratorOptions& opts) {
  const Index n = ham.dimension();
  const Index m = 4 * n;
  const RMat omega = omega_matrix(n);
  const RMat omega4 = omega_matrix(2 * n);
  auto generator = [&](double t) {
    const HamiltonianCoefficients k = ham.at(t);
    const RMat reH = k.H.real();
    const RMat imH = k.H.imag();
    const RMat K = join_blocks<RMat>(-omega.transpose() * imH * omega, omega * reH,
                                     -reH * omega, imH);
    return RMat(omega4 * K);
  };
  auto rhs = [&](double t, const RVec& y, RVec& dy) {
    dy.resize(y.size());
    Eigen::Map<const RMat> Phi(y.data(), m, m);
    Eigen::Map<RMat> dPhi(dy.data(), m, m);
    dPhi = generator(t) * Phi;
  };
  RVec y = RMat::Identity(m, m).reshaped();
  DormandPrince<RVec> stepper(rhs, opts);
  double t = t0;
  std::vector<DoubledFlow> out;
  out.reserve(times.size());
  for (double target : times) {
    if (target < t) throw Error(ErrorKind::invalid_argument, "flow sample times must ascend from t0");
    require_status(stepper.advance(t, y, target), t, "doubled flow integration");
    out.push_back({y.reshaped(m, m), target});
  }
  return out;
}

DoubledFlow doubled_flow_from(const FlowMatrix& S) {
  const Index n = S.S.rows() / 2;
  const RMat omega = omega_matrix(n);
  const RMat re = S.S.real();
  const RMat im = S.S.imag();
  return {join_blocks<RMat>(omega * re * omega.transpose(), omega * im,
                            -im * omega.transpose(), re),
          S.t};
}

Metric phi_star_metric(const DoubledFlow& Phi, const Metric& G) {
  RMat g = block_mobius<RMat>(Phi.Phi, G.matrix());
  g = 0.5 * (g + g.transpose()).eval();
  return Metric(std::move(g), 1e-8);
}

ComplexTrajectory integrate_complex_path(const PhasePoint& z0, const ShapeMatrix& B0,
                                         const QuadraticHamiltonian& ham, double t0, double t1,
                                         const EvolutionOptions& opts) {
  const Index n = ham.dimension();
  if (z0.size() != 2 * n || B0.dimension() != n) {
    throw Error(ErrorKind::dimension_mismatch, "initial data does not match Hamiltonian");
  }
  const ComplexLayout L{n};
  const CMat omega = omega_matrix(n).cast<cplx>();
  const double hbar = opts.hbar;
  const NormConvention conv = opts.norm;
  const bool ablate = opts.ablate_alpha_trace;

  auto rhs = [&, n](double t, const CVec& y, CVec& dy) {
    dy.resize(y.size());
    const HamiltonianCoefficients k = ham.at(t);
    const auto z = y.head(2 * n);
    Eigen::Map<const CMat> B(y.data() + L.b_offset(), n, n);
    const CVec grad = k.H * z + k.c;
    const CVec zdot = omega * grad;
    const CMat Bdot = shape_rhs(k, B);
    const cplx ham_value = 0.5 * cplx(z.transpose() * k.H * z) + cplx(k.c.transpose() * z);
    const cplx action = cplx(z.head(n).transpose() * zdot.tail(n));
    cplx alpha_dot = (action - ham_value) / hbar;
    if (!ablate) {
      const auto h = split_blocks<CMat>(k.H);
      if (conv == NormConvention::norm_consistent) {
        const RMat imB = B.imag();
        const RMat imBdot = Bdot.imag();
        const double log_det_rate = imB.partialPivLu().solve(imBdot).trace();
        alpha_dot += 0.5 * I_unit * (h.pp * B + h.qp).trace() + 0.25 * I_unit * log_det_rate;
      } else {
        const CMat Binv_qq = B.partialPivLu().solve(h.qq);
        alpha_dot += 0.25 * I_unit * ((h.pp * B).trace() - Binv_qq.trace());
      }
    }
    dy.head(2 * n) = zdot;
    Eigen::Map<CMat>(dy.data() + L.b_offset(), n, n) = Bdot;
    dy(L.alpha_offset()) = alpha_dot;
  };
  auto post = [n, L](CVec& y) {
    Eigen::Map<CMat> B(y.data() + L.b_offset(), n, n);
    const CMat sym = 0.5 * (B + B.transpose());
    B = sym;
  };
  auto min_eig = [n, L](const CVec& y) {
    Eigen::Map<const CMat> B(y.data() + L.b_offset(), n, n);
    return min_symmetric_eigenvalue(B.imag());
  };
  const double floor = opts.breakdown_factor * B0.im().trace() / static_cast<double>(n);
  auto monitor = [&](const CVec& y) { return min_eig(y) > floor; };

  CVec y0(L.size());
  y0.head(2 * n) = z0;
  Eigen::Map<CMat>(y0.data() + L.b_offset(), n, n) = B0.matrix();
  y0(L.alpha_offset()) = 0.0;

  auto run = run_monitored<CVec>(rhs, post, monitor, min_eig, y0, sample_times(t0, t1, opts.dt_sample),
                                 capped(opts.integrator, opts.dt_sample), opts.breakdown_bracket);
  ComplexTrajectory traj;
  traj.n = n;
  traj.breakdown = run.breakdown;
  traj.samples.reserve(run.times.size());
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const CVec& y = run.states[i];
    traj.samples.push_back({run.times[i], y.head(2 * n),
                            Eigen::Map<const CMat>(y.data() + L.b_offset(), n, n),
                            y(L.alpha_offset())});
  }
  return traj;
}

RealTrajectory integrate_real_path(const RealPhasePoint& Z0, const Metric& G0,
                                   const QuadraticHamiltonian& ham, double t0, double t1,
                                   const EvolutionOptions& opts) {
  const Index n = ham.dimension();
  if (Z0.size() != 2 * n || G0.dimension() != n) {
    throw Error(ErrorKind::dimension_mismatch, "initial data does not match Hamiltonian");
  }
  const RealLayout L{n};
  const RMat omega = omega_matrix(n);
  const double hbar = opts.hbar;
  const NormConvention conv = opts.norm;

  auto rhs = [&, n](double t, const RVec& y, RVec& dy) {
    dy.resize(y.size());
    const HamiltonianCoefficients k = ham.at(t);
    const RVec Z = y.head(2 * n);
    Eigen::Map<const RMat> G(y.data() + L.g_offset(), 2 * n, 2 * n);
    const RMat reH = k.H.real();
    const RMat imH = k.H.imag();
    const RVec rec = k.c.real();
    const RVec imc = k.c.imag();
    const RVec damping = imH * Z + imc;
    dy.head(2 * n) = omega * (reH * Z + rec) + G.partialPivLu().solve(damping);
    Eigen::Map<RMat>(dy.data() + L.g_offset(), 2 * n, 2 * n) = metric_rhs(k, G);
    const double trace_term = 0.5 * (imH * omega * G * omega.transpose()).trace();
    const double quad = Z.dot(imH * Z);
    const double lin = imc.dot(Z);
    const double beta_dot = conv == NormConvention::norm_consistent
                                ? -(2.0 / hbar) * (0.5 * quad + lin) - trace_term
                                : -(2.0 / hbar) * quad - lin / hbar - trace_term;
    dy(L.beta_offset()) = beta_dot;
  };
  auto post = [n, L](RVec& y) {
    Eigen::Map<RMat> G(y.data() + L.g_offset(), 2 * n, 2 * n);
    const RMat sym = 0.5 * (G + G.transpose());
    G = sym;
  };
  auto min_eig = [n, L](const RVec& y) {
    Eigen::Map<const RMat> G(y.data() + L.g_offset(), 2 * n, 2 * n);
    return min_symmetric_eigenvalue(G);
  };
  const double floor =
      opts.breakdown_factor * G0.matrix().trace() / static_cast<double>(2 * n);
  auto monitor = [&](const RVec& y) { return min_eig(y) > floor; };

  RVec y0(L.size());
  y0.head(2 * n) = Z0;
  Eigen::Map<RMat>(y0.data() + L.g_offset(), 2 * n, 2 * n) = G0.matrix();
  y0(L.beta_offset()) = 0.0;

  auto run = run_monitored<RVec>(rhs, post, monitor, min_eig, y0, sample_times(t0, t1, opts.dt_sample),
                                 capped(opts.integrator, opts.dt_sample), opts.breakdown_bracket);
  RealTrajectory traj;
  traj.n = n;
  traj.breakdown = run.breakdown;
  traj.samples.reserve(run.times.size());
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const RVec& y = run.states[i];
    traj.samples.push_back({run.times[i], y.head(2 * n),
                            Eigen::Map<const RMat>(y.data() + L.g_offset(), 2 * n, 2 * n),
                            y(L.beta_offset())});
  }
  return traj;
}

RealTrajectory project_trajectory(const ComplexTrajectory& ct, double hbar) {
  RealTrajectory out;
  out.n = ct.n;
  out.breakdown = ct.breakdown;
  out.samples.reserve(ct.samples.size());
  for (const ComplexSample& s : ct.samples) {
    const ShapeMatrix shape(s.B);
    const ProjectionResult red = reduce_state(s.z, shape);
    const Metric G = metric_from_shape(shape);
    const double beta = 2.0 * s.alpha.imag() + 2.0 * red.sigma.imag() / hbar;
    out.samples.push_back({s.t, red.Z, G.matrix(), beta});
  }
  return out;
}

double stationary_residual(const QuadraticHamiltonian& ham, const ShapeMatrix& B) {
  if (!ham.is_constant()) {
    throw Error(ErrorKind::invalid_argument, "stationary_residual needs a constant Hamiltonian");
  }
  return shape_rhs(ham.at(0.0), B.matrix()).cwiseAbs().maxCoeff();
}

double stationary_residual(const QuadraticHamiltonian& ham, const Metric& G) {
  if (!ham.is_constant()) {
    throw Error(ErrorKind::invalid_argument, "stationary_residual needs a constant Hamiltonian");
  }
  return metric_rhs(ham.at(0.0), G.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace nhc
