#include "nhc/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

#include "nhc/errors.hpp"
#include "nhc/geometry.hpp"

namespace nhc {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& m) { throw Error(ErrorKind::config, m); }

void allow_keys(const json& j, const std::string& where, std::set<std::string> keys) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) config_error("unknown key '" + k + "' in " + where);
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_number()) config_error(where + "." + key + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(where + "." + key + " must be finite");
  return v;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj[key], key, where) : fallback;
}

std::vector<double> array(const json& obj, const std::string& key, std::size_t size,
                          const std::string& where) {
  if (!obj.contains(key)) config_error(where + "." + key + " is required");
  const json& a = obj[key];
  if (!a.is_array() || a.size() != size) {
    config_error(where + "." + key + " must be an array of " + std::to_string(size) + " numbers");
  }
  std::vector<double> v;
  v.reserve(size);
  for (std::size_t i = 0; i < size; ++i) v.push_back(number(a[i], key + "[" + std::to_string(i) + "]", where));
  return v;
}

std::vector<double> array_or_zero(const json& obj, const std::string& key, std::size_t size,
                                  const std::string& where) {
  return obj.contains(key) ? array(obj, key, size, where) : std::vector<double>(size, 0.0);
}

RMat square(const std::vector<double>& v, Index k) {
  RMat M(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) M(i, j) = v[static_cast<std::size_t>(i * k + j)];
  return M;
}

RVec vector_of(const std::vector<double>& v) {
  return Eigen::Map<const RVec>(v.data(), static_cast<Index>(v.size()));
}

void require_symmetric(const RMat& M, const std::string& name) {
  std::ostringstream bad;
  int count = 0;
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = i + 1; j < M.cols(); ++j) {
      const double d = std::abs(M(i, j) - M(j, i));
      if (d > kIntakeAsymmetryLimit) {
        if (count++) bad << ", ";
        bad << name << "[" << i << "][" << j << "] vs " << name << "[" << j << "][" << i << "] (diff "
            << d << ")";
      }
    }
  }
  if (count) config_error("asymmetric matrix: " + bad.str());
}

RMat symmetrized(const RMat& M, const std::string& name) {
  require_symmetric(M, name);
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryWarnThreshold) {
    std::ostringstream os;
    os << name << " asymmetry " << asym << " symmetrized on intake";
    emit_warning(os.str());
  }
  return 0.5 * (M + M.transpose());
}

Route route_from_string(const std::string& s) {
  if (s == "complex") return Route::complex;
  if (s == "real") return Route::real;
  if (s == "both") return Route::both;
  config_error("initial.route must be complex, real or both");
}

}  // namespace

std::string_view to_string(Route r) {
  switch (r) {
    case Route::complex: return "complex";
    case Route::real: return "real";
    case Route::both: return "both";
  }
  return "unknown";
}

QuadraticHamiltonian Scenario::hamiltonian() const {
  if (time_dependence.preset.empty()) return QuadraticHamiltonian(H, c, "scenario");
  const CMat Hc = H;
  const CVec cc = c;
  const TimeDependence td = time_dependence;
  std::function<double(double)> factor;
  if (td.preset == "ramp") {
    factor = [td](double t) { return 1.0 + td.rate * t; };
  } else if (td.preset == "cosine") {
    factor = [td](double t) { return 1.0 + td.depth * std::cos(td.omega * t); };
  } else {
    config_error("unknown time_dependence preset '" + td.preset + "' (ramp, cosine)");
  }
  return QuadraticHamiltonian::time_dependent(
      n,
      [Hc, cc, factor](double t) {
        const double f = factor(t);
        return HamiltonianCoefficients{f * Hc, f * cc};
      },
      "scenario/" + td.preset);
}

EvolutionOptions Scenario::evolution_options() const {
  EvolutionOptions o;
  o.integrator = integrator;
  o.hbar = hbar;
  o.dt_sample = dt_sample;
  o.norm = norm;
  return o;
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(root, "config",
             {"n", "hbar", "hamiltonian", "initial", "time", "integrator", "output", "norm_convention"});
  Scenario s;
  if (!root.contains("n") || !root["n"].is_number_integer() || root["n"].get<long>() < 1) {
    config_error("config.n must be a positive integer");
  }
  s.n = root["n"].get<Index>();
  const Index n = s.n;
  const auto N2 = static_cast<std::size_t>(2 * n);
  s.hbar = number_or(root, "hbar", 1.0, "config");
  if (!(s.hbar > 0.0)) config_error("config.hbar must be positive");

  if (!root.contains("hamiltonian")) config_error("config.hamiltonian is required");
  const json& hj = root["hamiltonian"];
  allow_keys(hj, "hamiltonian", {"H_re", "H_im", "c_re", "c_im", "time_dependence"});
  const RMat Hre = square(array(hj, "H_re", N2 * N2, "hamiltonian"), 2 * n);
  const RMat Him = square(array_or_zero(hj, "H_im", N2 * N2, "hamiltonian"), 2 * n);
  require_symmetric(Hre, "H_re");
  require_symmetric(Him, "H_im");
  s.H = Hre.cast<cplx>() + I_unit * Him.cast<cplx>();
  s.c = vector_of(array_or_zero(hj, "c_re", N2, "hamiltonian")).cast<cplx>() +
        I_unit * vector_of(array_or_zero(hj, "c_im", N2, "hamiltonian")).cast<cplx>();
  if (hj.contains("time_dependence")) {
    const json& td = hj["time_dependence"];
    if (td.is_string()) {
      s.time_dependence.preset = td.get<std::string>();
    } else {
      allow_keys(td, "hamiltonian.time_dependence", {"preset", "rate", "omega", "depth"});
      if (!td.contains("preset") || !td["preset"].is_string()) {
        config_error("hamiltonian.time_dependence.preset must be a string");
      }
      s.time_dependence.preset = td["preset"].get<std::string>();
      s.time_dependence.rate = number_or(td, "rate", 0.0, "time_dependence");
      s.time_dependence.omega = number_or(td, "omega", 1.0, "time_dependence");
      s.time_dependence.depth = number_or(td, "depth", 0.0, "time_dependence");
    }
    if (s.time_dependence.preset != "ramp" && s.time_dependence.preset != "cosine") {
      config_error("unknown time_dependence preset '" + s.time_dependence.preset + "' (ramp, cosine)");
    }
  }

  if (!root.contains("initial")) config_error("config.initial is required");
  const json& ij = root["initial"];
  allow_keys(ij, "initial", {"route", "z_re", "z_im", "B_re", "B_im", "Z", "G"});
  if (ij.contains("route")) {
    if (!ij["route"].is_string()) config_error("initial.route must be a string");
    s.route = route_from_string(ij["route"].get<std::string>());
  }
  const auto Nn = static_cast<std::size_t>(n * n);
  try {
    if (ij.contains("z_re") || ij.contains("B_re")) {
      s.z0 = vector_of(array(ij, "z_re", N2, "initial")).cast<cplx>() +
             I_unit * vector_of(array_or_zero(ij, "z_im", N2, "initial")).cast<cplx>();
      const RMat Bre = symmetrized(square(array(ij, "B_re", Nn, "initial"), n), "B_re");
      const RMat Bim = symmetrized(square(array(ij, "B_im", Nn, "initial"), n), "B_im");
      s.B0 = ShapeMatrix(Bre.cast<cplx>() + I_unit * Bim.cast<cplx>()).matrix();
    } else if (ij.contains("Z") || ij.contains("G")) {
      const RVec Z = vector_of(array(ij, "Z", N2, "initial"));
      const RMat G = symmetrized(square(array(ij, "G", N2 * N2, "initial"), 2 * n), "G");
      const Metric metric(G);
      s.Z0 = Z;
      s.G0 = metric.matrix();
      s.z0 = Z.cast<cplx>();
      s.B0 = shape_from_metric(metric).matrix();
    } else {
      config_error("initial needs z_re/B_re/B_im or Z/G");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    config_error(std::string("invalid initial state: ") + e.what());
  }

  if (root.contains("time")) {
    const json& tj = root["time"];
    allow_keys(tj, "time", {"t0", "t1", "dt_sample"});
    s.t0 = number_or(tj, "t0", 0.0, "time");
    s.t1 = number_or(tj, "t1", 1.0, "time");
    s.dt_sample = number_or(tj, "dt_sample", 1e-2, "time");
  }
  if (!(s.t1 > s.t0)) config_error("time.t1 must exceed time.t0");
  if (!(s.dt_sample > 0.0)) config_error("time.dt_sample must be positive");

  s.integrator = IntegratorOptions::from_environment();
  if (root.contains("integrator")) {
    const json& ig = root["integrator"];
    allow_keys(ig, "integrator", {"rel_tol", "abs_tol"});
    s.integrator.rel_tol = number_or(ig, "rel_tol", s.integrator.rel_tol, "integrator");
    s.integrator.abs_tol = number_or(ig, "abs_tol", s.integrator.abs_tol, "integrator");
    if (!(s.integrator.rel_tol > 0.0) || !(s.integrator.abs_tol > 0.0)) {
      config_error("integrator tolerances must be positive");
    }
  }
  if (root.contains("norm_convention")) {
    if (!root["norm_convention"].is_string()) config_error("norm_convention must be a string");
    try {
      s.norm = norm_convention_from_string(root["norm_convention"].get<std::string>());
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  if (root.contains("output")) {
    const json& oj = root["output"];
    allow_keys(oj, "output", {"path", "format", "stride"});
    if (oj.contains("path")) {
      if (!oj["path"].is_string()) config_error("output.path must be a string");
      s.output_path = oj["path"].get<std::string>();
    }
    if (oj.contains("format")) {
      if (!oj["format"].is_string()) config_error("output.format must be a string");
      s.format = io::format_from_string(oj["format"].get<std::string>());
    }
    if (oj.contains("stride")) {
      if (!oj["stride"].is_number_integer() || oj["stride"].get<long>() < 1) {
        config_error("output.stride must be a positive integer");
      }
      s.stride = oj["stride"].get<std::size_t>();
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) config_error("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

std::string route_output_path(const std::string& base, Route route, std::string_view tag) {
  if (route != Route::both) return base;
  const std::filesystem::path p(base);
  std::filesystem::path out = p.parent_path() / p.stem();
  out += "." + std::string(tag) + p.extension().string();
  return out.string();
}

}  // namespace nhc
