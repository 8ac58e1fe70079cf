#include "nhc/integrator.hpp"

#include <cstdlib>
#include <string>

#include "nhc/errors.hpp"

namespace nhc {

IntegratorOptions IntegratorOptions::from_environment() {
  IntegratorOptions opts;
  if (const char* env = std::getenv("NHC_DEFAULT_TOL")) {
    try {
      std::size_t used = 0;
      const double tol = std::stod(env, &used);
      if (used > 0 && tol > 0.0 && std::isfinite(tol)) opts.rel_tol = tol;
    } catch (const std::exception&) {
      // unparsable override: keep the default
    }
  }
  return opts;
}

std::string to_string(StepStatus status) {
  switch (status) {
    case StepStatus::ok: return "ok";
    case StepStatus::step_underflow: return "step-size underflow";
    case StepStatus::too_many_steps: return "step budget exhausted";
    case StepStatus::non_finite: return "non-finite state";
    case StepStatus::monitor_stop: return "left admissible region";
  }
  return "unknown";
}

std::vector<double> sample_times(double t0, double t1, double dt) {
  if (!(t1 >= t0)) throw Error(ErrorKind::invalid_argument, "t1 must be >= t0");
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "sample spacing must be positive");
  std::vector<double> times{t0};
  if (t1 == t0) return times;
  const auto intervals = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
  for (std::size_t k = 1; k < intervals; ++k) times.push_back(t0 + static_cast<double>(k) * dt);
  times.push_back(t1);
  return times;
}

}  // namespace nhc
