#pragma once

#include <optional>
#include <string>

#include "nhc/dynamics.hpp"
#include "nhc/io.hpp"

namespace nhc {

enum class Route { complex, real, both };

std::string_view to_string(Route r);

/// Named time dependence multiplying the constant coefficients:
/// ramp: (1 + rate t); cosine: (1 + depth cos(omega t)).
struct TimeDependence {
  std::string preset;  // empty for constant coefficients
  double rate = 0.0;
  double omega = 1.0;
  double depth = 0.0;
};

/// One propagation run as read from a JSON config.
struct Scenario {
  Index n = 1;
  double hbar = 1.0;
  CMat H;
  CVec c;
  TimeDependence time_dependence;
  Route route = Route::complex;
  PhasePoint z0;  // complex initial centre (z, or Z lifted to C)
  CMat B0;        // shape (given, or derived from G)
  std::optional<RealPhasePoint> Z0;
  std::optional<RMat> G0;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt_sample = 1e-2;
  IntegratorOptions integrator;
  NormConvention norm = NormConvention::norm_consistent;
  std::string output_path;
  io::Format format = io::Format::csv;
  std::size_t stride = 1;

  QuadraticHamiltonian hamiltonian() const;
  EvolutionOptions evolution_options() const;
};

/// Matrix asymmetry above which intake fails, naming the entries.
inline constexpr double kIntakeAsymmetryLimit = 1e-6;

/// Throws Error(config) on IO errors, schema violations or broken symmetry.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Output file for a route: the configured path when one route runs; for
/// route both, "<stem>.<tag><ext>" with tag complex, projected or real.
std::string route_output_path(const std::string& base, Route route, std::string_view tag);

}  // namespace nhc
