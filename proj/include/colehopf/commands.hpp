#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "colehopf/classify.hpp"
#include "colehopf/config.hpp"
#include "colehopf/io.hpp"
#include "colehopf/report.hpp"
#include "colehopf/verify.hpp"

namespace colehopf {

inline constexpr double kMinObservedOrder = 3.5;

struct CommandIO {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

namespace detail {

inline std::filesystem::path prepare_output(const RunConfig& c) {
  const std::filesystem::path dir(c.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string snapshot_stem(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%06zu", prefix, index);
  return buf;
}

inline std::vector<std::string> numbered(const char* prefix, std::size_t q) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= q; ++k) out.push_back(std::string(prefix) + std::to_string(k));
  return out;
}

template <class... Vs>
std::vector<std::string> header(const char* first, const Vs&... groups) {
  std::vector<std::string> h{first};
  (h.insert(h.end(), groups.begin(), groups.end()), ...);
  return h;
}

inline void append(std::vector<std::string>& row, const std::vector<double>& values) {
  for (double v : values) row.push_back(format_double(v));
}

}  // namespace detail

/// Evolves the psi-system; writes diagnostics.csv and one snapshot per sample.
inline int cmd_simulate(const RunConfig& c, CommandIO io = {}) {
  const auto initial = psi_state(c);
  const auto dir = detail::prepare_output(c);
  const std::size_t q = c.species;
  CsvWriter csv(dir / "diagnostics.csv", detail::header("t", detail::numbered("N_", q), detail::numbered("drift_", q),
                                                        detail::numbered("cont_res_", q)));
  std::size_t index = 0;
  auto observer = [&](const SimState& at, const DiagnosticsRecord& r) {
    std::vector<std::string> row{format_double(r.t)};
    detail::append(row, r.norms);
    detail::append(row, r.norm_drift);
    detail::append(row, r.continuity_residual);
    csv.write_row(row);
    if (c.snapshots) write_snapshot(dir / "snapshots", detail::snapshot_stem("psi", index), at.fields, at.t);
    ++index;
  };
  try {
    const auto result = evolve(initial, c.time.dt, c.time.t_end, c.time.sample_every, observer);
    for (const auto& w : result.warnings) io.err << "warning: " << w << "\n";
    const auto& last = result.records.back();
    double drift = 0.0;
    for (double d : last.norm_drift) drift = std::max(drift, std::abs(d));
    io.out << "simulate: " << result.records.size() << " samples, final t=" << format_double(last.t)
           << ", max |norm drift|=" << format_double(drift) << "\n";
    return 0;
  } catch (const BlowUpError& e) {
    io.err << "error: " << e.what() << " (" << e.partial().size() << " samples written)\n";
    return 2;
  }
}

/// Writes the transformed coefficient tables; with initial data also the
/// gauge image of psi_0.
inline int cmd_transform(const RunConfig& c, CommandIO io = {}) {
  const auto spec = build_spec(c);
  if (std::holds_alternative<LinearSpec>(spec))
    throw Error(ErrorKind::Config, "config key 'nonlinearity.family': transform needs drift_cubic, derivative or case1-3");
  const auto A = build_dispersion(c);
  const auto t = transformed_spec(spec, A);
  const auto dir = detail::prepare_output(c);
  const std::size_t q = c.species;
  {
    CsvWriter csv(dir / "transformed_coefficients.csv", {"table", "k", "j", "i", "value"});
    auto idx = [](std::size_t v) { return std::to_string(v + 1); };
    auto matrix = [&](const char* name, const Matrix& m) {
      for (std::size_t k = 0; k < q; ++k)
        for (std::size_t j = 0; j < q; ++j) csv.write_row({name, idx(k), idx(j), "", format_double(m(k, j))});
    };
    matrix("drift_self", t.drift_self);
    matrix("drift_cross", t.drift_cross);
    matrix("cubic", t.cubic);
    for (std::size_t k = 0; k < q; ++k)
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < q; ++i)
          csv.write_row({"quartic", idx(k), idx(j), idx(i), format_double(t.quartic(k, j, i))});
    for (std::size_t k = 0; k < q; ++k) csv.write_row({"const_shift", idx(k), "", "", format_double(t.const_shift[k])});
    const auto& n = c.nonlinearity;
    if (n.family == "case2") {
      const auto eta = case2_coeffs(n.delta, n.beta_diag, A).eta;
      for (std::size_t k = 0; k < q; ++k) csv.write_row({"eta", idx(k), "", "", format_double(eta[k])});
    } else if (n.family == "case3") {
      const auto eta = case3_coeffs(n.delta, n.gamma, A).eta;
      matrix("eta", eta);
    }
  }
  io.out << "transform: wrote " << (dir / "transformed_coefficients.csv").string() << "\n";
  if (c.initial.empty()) return 0;

  const auto psi = build_initial(c);
  const auto gen = compute_generator(spec, to_hydro(psi, c.density_floor), A, c.anchor);
  bool periodic = true;
  for (std::size_t k = 0; k < q; ++k) {
    if (gen.ramp_periodic(k)) continue;
    periodic = false;
    io.err << "warning: species " << k + 1 << " generator ramp " << format_double(gen.ramp[k]) << " makes "
           << format_double(gen.ramp[k] * psi.grid().length() / (2.0 * std::numbers::pi))
           << " turns over the domain; exp(i sigma) is not periodic\n";
  }
  if (!periodic) {
    io.err << "error: phi_initial not written (non-periodic ramp)\n";
    return 3;
  }
  write_snapshot(dir, "phi_initial", apply_gauge(psi, gen).fields, 0.0);
  io.out << "transform: wrote " << (dir / "phi_initial.bin").string() << "\n";
  return 0;
}

/// Labels of the single-species derivative equation, one per line. Inputs
/// are raw strings so that malformed numbers are reported, not coerced.
inline int cmd_classify(const std::string& beta, const std::string& gamma, const std::string& delta,
                        const std::string& lambda, double tol = kDefaultClassifyTolerance, CommandIO io = {}) {
  double v[4];
  const std::string* raw[4] = {&beta, &gamma, &delta, &lambda};
  const char* names[4] = {"beta", "gamma", "delta", "lambda"};
  for (int n = 0; n < 4; ++n) {
    const auto parsed = parse_double(*raw[n]);
    if (!parsed || !std::isfinite(*parsed)) {
      io.err << "error: --" << names[n] << " '" << *raw[n] << "' is not a finite number\n";
      return 1;
    }
    v[n] = *parsed;
  }
  if (!(tol > 0.0)) {
    io.err << "error: --tolerance must be positive\n";
    return 1;
  }
  for (auto label : classify_q1(v[0], v[1], v[2], v[3], tol)) io.out << to_string(label) << "\n";
  return 0;
}

inline void write_equivalence_csv(const std::filesystem::path& path, const VerifyOutcome& v, std::size_t q) {
  CsvWriter csv(path, detail::header("t", detail::numbered("dens_diff_", q), detail::numbered("phase_res_", q)));
  for (const auto& s : v.samples) {
    std::vector<std::string> row{format_double(s.t)};
    detail::append(row, s.density_diff);
    detail::append(row, s.phase_residual);
    csv.write_row(row);
  }
}

/// Gauge-equivalence experiment; exit 0 iff the final density gap is below tolerance.
inline int cmd_verify(const RunConfig& c, CommandIO io = {}) {
  const auto v = run_verify(c);
  const auto dir = detail::prepare_output(c);
  write_equivalence_csv(dir / "equivalence.csv", v, c.species);
  for (const auto& w : v.warnings) io.err << "warning: " << w << "\n";
  io.out << "verify: density gap " << format_double(v.equivalence_gap) << ", phase residual "
         << format_double(v.phase_gap) << ", norm drift " << format_double(v.norm_drift) << " (tolerance "
         << format_double(c.tolerance) << ")\n";
  if (v.within_tolerance) return 0;
  io.err << "error: density gap exceeds tolerance\n";
  return 2;
}

/// verify --sweep: one row per value; exit 0 iff every row passed.
inline int cmd_verify_sweep(const Json& base, const std::string& sweep_arg, const ConfigAdjust& adjust,
                            CommandIO io = {}) {
  const auto [axis, values] = parse_sweep_arg(sweep_arg);
  auto first = parse_config(base);
  if (adjust) adjust(first);
  const auto result = sweep(base, axis, values, adjust);
  const auto dir = detail::prepare_output(first);
  write_sweep_csv(dir / "sweep.csv", result);
  for (const auto& row : result.rows) {
    io.out << axis << "=" << format_double(row.value) << ": " << (row.ok ? "ok" : "failed");
    if (!row.ok) io.out << " (exit " << row.error_code << ": " << row.message << ")";
    io.out << "\n";
  }
  return result.all_ok() ? 0 : 2;
}

/// Self-convergence in dt; exit 0 iff the observed order reaches 3.5.
inline int cmd_convergence(const RunConfig& c, CommandIO io = {}) {
  const auto psi = psi_state(c);
  const auto state = c.convergence.system == "phi" ? phi_state(psi, c.anchor) : psi;
  const double bound = stability_bound(state.fields.grid(), state.A);
  if (c.time.dt > bound) {
    io.err << "warning: dt=" << format_double(c.time.dt) << " exceeds the RK4 stability bound "
           << format_double(bound) << "; not running\n";
    return 2;
  }
  ConvergenceStudy study;
  try {
    study = self_convergence(state, c.time.dt, c.time.t_end, c.convergence.levels, c.convergence.reference_divisor);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BlowUp) throw;
    io.err << "error: " << e.what() << "\n";
    return 2;
  }
  for (const auto& w : study.warnings) io.err << "warning: " << w << "\n";
  const auto dir = detail::prepare_output(c);
  CsvWriter csv(dir / "convergence.csv", {"dt", "steps", "sup_diff", "observed_order"});
  for (const auto& r : study.rows)
    csv.write_row({format_double(r.dt), std::to_string(r.steps), format_double(r.sup_diff),
                   std::isnan(r.observed_order) ? "" : format_double(r.observed_order)});
  io.out << "convergence: observed order " << format_double(study.observed_order) << "\n";
  if (study.observed_order >= kMinObservedOrder) return 0;
  io.err << "error: observed order below " << kMinObservedOrder << "\n";
  return 2;
}

}  // namespace colehopf
