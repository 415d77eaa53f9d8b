#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "colehopf/classify.hpp"
#include "colehopf/error.hpp"
#include "colehopf/fields.hpp"
#include "colehopf/grid.hpp"
#include "colehopf/nonlinearity.hpp"
#include "colehopf/tensor.hpp"

namespace colehopf {

using Json = nlohmann::json;

struct GridConfig {
  std::size_t n_points = 256;
  double x_min = 0.0;
  double x_max = 2.0 * std::numbers::pi;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ModeConfig {
  int k = 0;
  double re = 0.0;
  double im = 0.0;
  friend bool operator==(const ModeConfig&, const ModeConfig&) = default;
};

// amplitude * exp(-(x - center)^2 / (2 width^2)) * exp(i k0 x)
struct GaussianConfig {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double k0 = 0.0;
  friend bool operator==(const GaussianConfig&, const GaussianConfig&) = default;
};

// Background plus random low modes drawn from the run seed.
struct RandomInitConfig {
  double base_re = 0.3;
  double base_im = 0.0;
  int max_mode = 3;
  double ripple = 0.5;
  friend bool operator==(const RandomInitConfig&, const RandomInitConfig&) = default;
};

struct InitialSpecies {
  std::vector<ModeConfig> modes;
  std::optional<GaussianConfig> gaussian;
  std::optional<RandomInitConfig> random;
  friend bool operator==(const InitialSpecies&, const InitialSpecies&) = default;
};

struct TimeConfig {
  double dt = 1e-4;
  double t_end = 1.0;
  std::int64_t sample_every = 100;
  friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

/// family: linear | drift_cubic | derivative | case1 | case2 | case3.
/// Only the tables used by the family are meaningful; the rest stay empty.
struct NonlinearityConfig {
  std::string family = "linear";
  std::vector<double> drift;       // drift_cubic
  std::vector<double> gamma_diag;  // drift_cubic "gamma"
  Matrix beta, gamma, delta;       // derivative, case1-3
  Tensor3 lambda;                  // derivative
  std::vector<double> beta_diag;   // case2
  friend bool operator==(const NonlinearityConfig&, const NonlinearityConfig&) = default;
};

struct PerturbConfig {
  std::string table;  // drift_self | drift_cross | cubic | quartic | const_shift
  std::vector<std::size_t> index;
  double delta = 0.0;
  friend bool operator==(const PerturbConfig&, const PerturbConfig&) = default;
};

struct ConvergenceConfig {
  int levels = 3;
  int reference_divisor = 16;
  std::string system = "psi";
  friend bool operator==(const ConvergenceConfig&, const ConvergenceConfig&) = default;
};

struct RunConfig {
  GridConfig grid;
  std::size_t species = 1;
  std::vector<double> A{1.0};
  NonlinearityConfig nonlinearity;
  std::vector<InitialSpecies> initial;
  double amplitude = 1.0;
  TimeConfig time;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  double tolerance = 1e-6;
  std::size_t anchor = 0;
  double density_floor = kDefaultDensityFloor;
  bool snapshots = true;
  std::optional<PerturbConfig> perturb;
  ConvergenceConfig convergence;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Config, "config key '" + key + "': " + what);
}

inline std::string join_key(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where.empty() ? "<root>" : where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) config_error(join_key(where, key), "unknown key");
}

inline double get_double(const Json& v, const std::string& key) {
  if (!v.is_number()) config_error(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(key, "must be finite");
  return d;
}

inline std::int64_t get_int(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) config_error(key, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::size_t get_count(const Json& v, const std::string& key) {
  const auto n = get_int(v, key);
  if (n < 0) config_error(key, "must be >= 0");
  return static_cast<std::size_t>(n);
}

inline std::vector<double> get_vector(const Json& v, const std::string& key, std::size_t q) {
  if (!v.is_array()) config_error(key, "expected a list of " + std::to_string(q) + " numbers");
  if (v.size() != q)
    config_error(key, "expected " + std::to_string(q) + " entries (one per species), got " + std::to_string(v.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < q; ++i) out.push_back(get_double(v[i], key + "." + std::to_string(i)));
  return out;
}

inline Matrix get_matrix(const Json& v, const std::string& key, std::size_t q) {
  if (!v.is_array() || v.size() != q)
    config_error(key, "expected a " + std::to_string(q) + "x" + std::to_string(q) + " nested list");
  Matrix m(q);
  for (std::size_t k = 0; k < q; ++k) {
    const auto row = get_vector(v[k], key + "." + std::to_string(k), q);
    for (std::size_t j = 0; j < q; ++j) m(k, j) = row[j];
  }
  return m;
}

inline Tensor3 get_tensor(const Json& v, const std::string& key, std::size_t q) {
  if (!v.is_array() || v.size() != q) config_error(key, "expected a q x q x q nested list with q=" + std::to_string(q));
  Tensor3 t(q);
  for (std::size_t k = 0; k < q; ++k) {
    const auto m = get_matrix(v[k], key + "." + std::to_string(k), q);
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t i = 0; i < q; ++i) t(k, j, i) = m(j, i);
  }
  return t;
}

inline Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t k = 0; k < m.size(); ++k) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(k, j));
    out.push_back(row);
  }
  return out;
}

inline Json tensor_json(const Tensor3& t) {
  Json out = Json::array();
  for (std::size_t k = 0; k < t.size(); ++k) {
    Json mat = Json::array();
    for (std::size_t j = 0; j < t.size(); ++j) {
      Json row = Json::array();
      for (std::size_t i = 0; i < t.size(); ++i) row.push_back(t(k, j, i));
      mat.push_back(row);
    }
    out.push_back(mat);
  }
  return out;
}

inline NonlinearityConfig parse_nonlinearity(const Json& j, std::size_t q) {
  const std::string where = "nonlinearity";
  if (!j.is_object()) config_error(where, "expected an object");
  if (!j.contains("family") || !j["family"].is_string()) config_error(where + ".family", "missing or not a string");
  NonlinearityConfig n;
  n.family = j["family"].get<std::string>();
  auto matrix_or_zero = [&](const char* key) {
    return j.contains(key) ? get_matrix(j[key], join_key(where, key), q) : Matrix(q);
  };
  auto require = [&](const char* key) {
    if (!j.contains(key)) config_error(join_key(where, key), "required for family '" + n.family + "'");
  };
  if (n.family == "linear") {
    check_keys(j, where, {"family"});
  } else if (n.family == "drift_cubic") {
    check_keys(j, where, {"family", "drift", "gamma"});
    require("drift");
    n.drift = get_vector(j["drift"], where + ".drift", q);
    n.gamma_diag = j.contains("gamma") ? get_vector(j["gamma"], where + ".gamma", q) : std::vector<double>(q, 0.0);
  } else if (n.family == "derivative") {
    check_keys(j, where, {"family", "beta", "gamma", "delta", "lambda"});
    n.beta = matrix_or_zero("beta");
    n.gamma = matrix_or_zero("gamma");
    n.delta = matrix_or_zero("delta");
    n.lambda = j.contains("lambda") ? get_tensor(j["lambda"], where + ".lambda", q) : Tensor3(q);
  } else if (n.family == "case1") {
    check_keys(j, where, {"family", "delta"});
    require("delta");
    n.delta = matrix_or_zero("delta");
  } else if (n.family == "case2") {
    check_keys(j, where, {"family", "delta", "beta_diag"});
    require("delta");
    n.delta = matrix_or_zero("delta");
    n.beta_diag = j.contains("beta_diag") ? get_vector(j["beta_diag"], where + ".beta_diag", q)
                                           : std::vector<double>(q, 0.0);
  } else if (n.family == "case3") {
    check_keys(j, where, {"family", "delta", "gamma"});
    require("delta");
    n.delta = matrix_or_zero("delta");
    n.gamma = matrix_or_zero("gamma");
  } else {
    config_error(where + ".family", "unknown family '" + n.family +
                                        "' (linear, drift_cubic, derivative, case1, case2, case3)");
  }
  return n;
}

inline Json nonlinearity_json(const NonlinearityConfig& n) {
  Json j{{"family", n.family}};
  if (n.family == "drift_cubic") {
    j["drift"] = n.drift;
    j["gamma"] = n.gamma_diag;
  } else if (n.family == "derivative") {
    j["beta"] = matrix_json(n.beta);
    j["gamma"] = matrix_json(n.gamma);
    j["delta"] = matrix_json(n.delta);
    j["lambda"] = tensor_json(n.lambda);
  } else if (n.family == "case1") {
    j["delta"] = matrix_json(n.delta);
  } else if (n.family == "case2") {
    j["delta"] = matrix_json(n.delta);
    j["beta_diag"] = n.beta_diag;
  } else if (n.family == "case3") {
    j["delta"] = matrix_json(n.delta);
    j["gamma"] = matrix_json(n.gamma);
  }
  return j;
}

inline InitialSpecies parse_initial_species(const Json& j, const std::string& where) {
  check_keys(j, where, {"modes", "gaussian", "random"});
  InitialSpecies s;
  if (j.contains("modes")) {
    const auto& modes = j["modes"];
    if (!modes.is_array()) config_error(where + ".modes", "expected a list");
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::string key = where + ".modes." + std::to_string(m);
      check_keys(modes[m], key, {"k", "re", "im"});
      if (!modes[m].contains("k")) config_error(key + ".k", "missing");
      ModeConfig mode;
      mode.k = static_cast<int>(get_int(modes[m]["k"], key + ".k"));
      if (modes[m].contains("re")) mode.re = get_double(modes[m]["re"], key + ".re");
      if (modes[m].contains("im")) mode.im = get_double(modes[m]["im"], key + ".im");
      s.modes.push_back(mode);
    }
  }
  if (j.contains("gaussian")) {
    const auto& gj = j["gaussian"];
    const std::string key = where + ".gaussian";
    check_keys(gj, key, {"amplitude", "center", "width", "k0"});
    GaussianConfig g;
    if (gj.contains("amplitude")) g.amplitude = get_double(gj["amplitude"], key + ".amplitude");
    if (gj.contains("center")) g.center = get_double(gj["center"], key + ".center");
    if (gj.contains("width")) g.width = get_double(gj["width"], key + ".width");
    if (gj.contains("k0")) g.k0 = get_double(gj["k0"], key + ".k0");
    if (!(g.width > 0.0)) config_error(key + ".width", "must be positive");
    s.gaussian = g;
  }
  if (j.contains("random")) {
    const auto& rj = j["random"];
    const std::string key = where + ".random";
    check_keys(rj, key, {"base_re", "base_im", "max_mode", "ripple"});
    RandomInitConfig r;
    if (rj.contains("base_re")) r.base_re = get_double(rj["base_re"], key + ".base_re");
    if (rj.contains("base_im")) r.base_im = get_double(rj["base_im"], key + ".base_im");
    if (rj.contains("max_mode")) r.max_mode = static_cast<int>(get_int(rj["max_mode"], key + ".max_mode"));
    if (rj.contains("ripple")) r.ripple = get_double(rj["ripple"], key + ".ripple");
    if (r.max_mode < 1) config_error(key + ".max_mode", "must be >= 1");
    s.random = r;
  }
  if (s.modes.empty() && !s.gaussian && !s.random) config_error(where, "needs modes, gaussian or random");
  return s;
}

inline Json initial_species_json(const InitialSpecies& s) {
  Json j = Json::object();
  if (!s.modes.empty()) {
    j["modes"] = Json::array();
    for (const auto& m : s.modes) j["modes"].push_back({{"k", m.k}, {"re", m.re}, {"im", m.im}});
  }
  if (s.gaussian)
    j["gaussian"] = {{"amplitude", s.gaussian->amplitude}, {"center", s.gaussian->center},
                     {"width", s.gaussian->width}, {"k0", s.gaussian->k0}};
  if (s.random)
    j["random"] = {{"base_re", s.random->base_re}, {"base_im", s.random->base_im},
                   {"max_mode", s.random->max_mode}, {"ripple", s.random->ripple}};
  return j;
}

}  // namespace detail

/// Parses and validates a run configuration; Config errors name the key.
inline RunConfig parse_config(const Json& j) {
  using namespace detail;
  check_keys(j, "", {"grid", "species", "A", "nonlinearity", "initial", "amplitude", "time", "output_dir", "seed",
                     "tolerance", "anchor", "density_floor", "snapshots", "verify", "convergence"});
  RunConfig c;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "grid", {"n_points", "x_min", "x_max"});
    if (g.contains("n_points")) c.grid.n_points = get_count(g["n_points"], "grid.n_points");
    if (g.contains("x_min")) c.grid.x_min = get_double(g["x_min"], "grid.x_min");
    if (g.contains("x_max")) c.grid.x_max = get_double(g["x_max"], "grid.x_max");
    const auto n = c.grid.n_points;
    if (n < 8 || (n & (n - 1)) != 0) config_error("grid.n_points", "must be a power of two >= 8");
    if (!(c.grid.x_max > c.grid.x_min)) config_error("grid.x_max", "must exceed grid.x_min");
  }
  if (!j.contains("species")) config_error("species", "missing");
  c.species = get_count(j["species"], "species");
  if (c.species < 1) config_error("species", "must be >= 1");
  const auto q = c.species;

  if (!j.contains("A")) config_error("A", "missing");
  c.A = get_vector(j["A"], "A", q);
  for (std::size_t k = 0; k < q; ++k)
    if (c.A[k] == 0.0) config_error("A." + std::to_string(k), "dispersion must be nonzero");

  c.nonlinearity = j.contains("nonlinearity") ? parse_nonlinearity(j["nonlinearity"], q) : NonlinearityConfig{};

  if (j.contains("initial")) {
    const auto& init = j["initial"];
    if (!init.is_array() || init.size() != q)
      config_error("initial", "expected a list with one entry per species (" + std::to_string(q) + ")");
    for (std::size_t k = 0; k < q; ++k) c.initial.push_back(parse_initial_species(init[k], "initial." + std::to_string(k)));
  }
  if (j.contains("amplitude")) c.amplitude = get_double(j["amplitude"], "amplitude");

  if (j.contains("time")) {
    const auto& t = j["time"];
    check_keys(t, "time", {"dt", "t_end", "sample_every"});
    if (t.contains("dt")) c.time.dt = get_double(t["dt"], "time.dt");
    if (t.contains("t_end")) c.time.t_end = get_double(t["t_end"], "time.t_end");
    if (t.contains("sample_every")) c.time.sample_every = get_int(t["sample_every"], "time.sample_every");
  }
  if (!(c.time.dt > 0.0)) config_error("time.dt", "must be positive");
  if (!(c.time.t_end > 0.0)) config_error("time.t_end", "must be positive");
  if (c.time.sample_every < 1) config_error("time.sample_every", "must be >= 1");

  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) config_error("output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(get_count(j["seed"], "seed"));
  if (j.contains("tolerance")) c.tolerance = get_double(j["tolerance"], "tolerance");
  if (!(c.tolerance > 0.0)) config_error("tolerance", "must be positive");
  if (j.contains("anchor")) c.anchor = get_count(j["anchor"], "anchor");
  if (c.anchor >= c.grid.n_points) config_error("anchor", "must be a node index below grid.n_points");
  if (j.contains("density_floor")) c.density_floor = get_double(j["density_floor"], "density_floor");
  if (c.density_floor < 0.0) config_error("density_floor", "must be >= 0");
  if (j.contains("snapshots")) {
    if (!j["snapshots"].is_boolean()) config_error("snapshots", "expected true or false");
    c.snapshots = j["snapshots"].get<bool>();
  }

  if (j.contains("verify")) {
    const auto& v = j["verify"];
    check_keys(v, "verify", {"perturb"});
    if (v.contains("perturb")) {
      const auto& p = v["perturb"];
      check_keys(p, "verify.perturb", {"table", "index", "delta"});
      PerturbConfig pc;
      if (!p.contains("table") || !p["table"].is_string()) config_error("verify.perturb.table", "missing or not a string");
      pc.table = p["table"].get<std::string>();
      std::size_t rank = 0;
      if (pc.table == "const_shift")
        rank = 1;
      else if (pc.table == "drift_self" || pc.table == "drift_cross" || pc.table == "cubic")
        rank = 2;
      else if (pc.table == "quartic")
        rank = 3;
      else
        config_error("verify.perturb.table", "unknown table '" + pc.table + "'");
      if (!p.contains("index") || !p["index"].is_array() || p["index"].size() != rank)
        config_error("verify.perturb.index", "expected " + std::to_string(rank) + " zero-based indices");
      for (std::size_t r = 0; r < rank; ++r) {
        const auto idx = get_count(p["index"][r], "verify.perturb.index." + std::to_string(r));
        if (idx >= q) config_error("verify.perturb.index." + std::to_string(r), "out of range for q=" + std::to_string(q));
        pc.index.push_back(idx);
      }
      if (p.contains("delta")) pc.delta = get_double(p["delta"], "verify.perturb.delta");
      c.perturb = pc;
    }
  }

  if (j.contains("convergence")) {
    const auto& v = j["convergence"];
    check_keys(v, "convergence", {"levels", "reference_divisor", "system"});
    if (v.contains("levels")) c.convergence.levels = static_cast<int>(get_int(v["levels"], "convergence.levels"));
    if (v.contains("reference_divisor"))
      c.convergence.reference_divisor =
          static_cast<int>(get_int(v["reference_divisor"], "convergence.reference_divisor"));
    if (v.contains("system")) {
      if (!v["system"].is_string()) config_error("convergence.system", "expected \"psi\" or \"phi\"");
      c.convergence.system = v["system"].get<std::string>();
    }
    if (c.convergence.levels < 2 || c.convergence.levels > 8) config_error("convergence.levels", "must be in [2, 8]");
    if (c.convergence.reference_divisor < (1 << (c.convergence.levels - 1)))
      config_error("convergence.reference_divisor", "must be at least 2^(levels-1)");
    if (c.convergence.system != "psi" && c.convergence.system != "phi")
      config_error("convergence.system", "expected \"psi\" or \"phi\"");
  }
  return c;
}

inline Json to_json(const RunConfig& c) {
  using namespace detail;
  Json j;
  j["grid"] = {{"n_points", c.grid.n_points}, {"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}};
  j["species"] = c.species;
  j["A"] = c.A;
  j["nonlinearity"] = nonlinearity_json(c.nonlinearity);
  if (!c.initial.empty()) {
    j["initial"] = Json::array();
    for (const auto& s : c.initial) j["initial"].push_back(initial_species_json(s));
  }
  j["amplitude"] = c.amplitude;
  j["time"] = {{"dt", c.time.dt}, {"t_end", c.time.t_end}, {"sample_every", c.time.sample_every}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance;
  j["anchor"] = c.anchor;
  j["density_floor"] = c.density_floor;
  j["snapshots"] = c.snapshots;
  if (c.perturb) j["verify"]["perturb"] = {{"table", c.perturb->table}, {"index", c.perturb->index}, {"delta", c.perturb->delta}};
  j["convergence"] = {{"levels", c.convergence.levels},
                      {"reference_divisor", c.convergence.reference_divisor},
                      {"system", c.convergence.system}};
  return j;
}

inline std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file '" + path + "'");
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Config, "config file '" + path + "' is not valid JSON: " + e.what());
  }
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

inline Grid1D build_grid(const RunConfig& c) { return make_grid(c.grid.n_points, c.grid.x_min, c.grid.x_max); }

inline DispersionMatrix build_dispersion(const RunConfig& c) { return DispersionMatrix(c.A); }

/// The psi-system nonlinearity; case1-3 expand to derivative-family coefficients.
inline NonlinearitySpec build_spec(const RunConfig& c) {
  const auto& n = c.nonlinearity;
  const auto q = c.species;
  if (n.family == "linear") return LinearSpec{q};
  if (n.family == "drift_cubic") return DriftCubicSpec{n.drift, n.gamma_diag};
  if (n.family == "derivative") return DerivativeSpec{n.beta, n.gamma, n.delta, n.lambda};
  const auto A = build_dispersion(c);
  if (n.family == "case1") return case1_coeffs(n.delta, A);
  if (n.family == "case2") return case2_coeffs(n.delta, n.beta_diag, A).spec;
  if (n.family == "case3") return case3_coeffs(n.delta, n.gamma, A).spec;
  detail::config_error("nonlinearity.family", "unknown family '" + n.family + "'");
}

/// Initial psi sampled on the grid, scaled by the global amplitude.
inline ComplexFieldSet build_initial(const RunConfig& c) {
  if (c.initial.empty()) detail::config_error("initial", "this command needs initial data");
  const auto g = build_grid(c);
  std::vector<ComplexField> rows(c.species, ComplexField(g.size()));
  for (std::size_t k = 0; k < c.species; ++k) {
    const auto& s = c.initial[k];
    auto& row = rows[k];
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node(i);
      Complex v = 0.0;
      for (const auto& m : s.modes)
        v += Complex(m.re, m.im) * std::exp(Complex(0.0, 2.0 * std::numbers::pi * m.k * (x - g.x_min()) / g.length()));
      if (s.gaussian) {
        const auto& gs = *s.gaussian;
        const double u = (x - gs.center) / gs.width;
        v += gs.amplitude * std::exp(-0.5 * u * u) * std::exp(Complex(0.0, gs.k0 * x));
      }
      row[i] = v;
    }
    if (s.random) {
      std::mt19937_64 rng(c.seed + 7919 * k);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const auto& r = *s.random;
      const double each = r.ripple * std::abs(Complex(r.base_re, r.base_im)) / (2.0 * r.max_mode);
      std::vector<Complex> amp(2 * r.max_mode + 1);
      for (auto& a : amp) a = each * Complex(u(rng), u(rng));
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double theta = 2.0 * std::numbers::pi * (g.node(i) - g.x_min()) / g.length();
        Complex v(r.base_re, r.base_im);
        for (int m = 1; m <= r.max_mode; ++m) {
          v += amp[2 * m - 1] * std::exp(Complex(0.0, m * theta));
          v += amp[2 * m] * std::exp(Complex(0.0, -m * theta));
        }
        row[i] += v;
      }
    }
    for (auto& v : row) v *= c.amplitude;
  }
  return {g, std::move(rows)};
}

/// Sets a numeric value at a dotted key path (list indices as numbers) in a
/// raw config document. The key must already hold a number.
inline void set_numeric_key(Json& doc, const std::string& path, double value) {
  Json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (node->is_object()) {
      if (!node->contains(part)) detail::config_error(path, "no such key in the config");
      node = &(*node)[part];
    } else if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        detail::config_error(path, "'" + part + "' is not a list index");
      }
      if (idx >= node->size()) detail::config_error(path, "list index " + part + " out of range");
      node = &(*node)[idx];
    } else {
      detail::config_error(path, "no such key in the config");
    }
  }
  if (!node->is_number()) detail::config_error(path, "not a numeric key");
  if (node->is_number_integer()) {
    if (value != std::round(value)) detail::config_error(path, "integer key needs an integer value");
    *node = static_cast<std::int64_t>(std::llround(value));
  } else {
    *node = value;
  }
}

}  // namespace colehopf
