#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "colehopf/config.hpp"
#include "colehopf/gauge.hpp"
#include "colehopf/solver.hpp"

namespace colehopf {

/// One sampled time of the gauge-equivalence experiment.
struct EquivalenceSample {
  double t = 0.0;
  std::vector<double> density_diff;
  std::vector<double> phase_residual;
};

struct VerifyOutcome {
  std::vector<EquivalenceSample> samples;
  double norm_drift = 0.0;        // max_k |relative drift| of the psi run at the final sample
  double equivalence_gap = 0.0;   // max_k sup |rho_psi - rho_phi| at the final sample
  double phase_gap = 0.0;         // max_k phase residual at the final sample
  bool within_tolerance = false;  // equivalence_gap < tolerance
  std::vector<std::string> warnings;
};

/// Generator of the initial data, or NonPeriodicRamp if exp(i sigma) would not
/// be periodic on the grid.
inline GaugeGenerator periodic_generator(const NonlinearitySpec& spec, const HydroFields& h, const DispersionMatrix& A,
                                         std::size_t anchor) {
  auto gen = compute_generator(spec, h, A, anchor);
  for (std::size_t k = 0; k < gen.species(); ++k) {
    if (gen.ramp_periodic(k)) continue;
    std::ostringstream msg;
    msg << "species " << k + 1 << ": generator ramp " << gen.ramp[k] << " gives "
        << gen.ramp[k] * h.grid.length() / (2.0 * std::numbers::pi)
        << " turns over the domain; the gauge image is not periodic";
    throw Error(ErrorKind::NonPeriodicRamp, msg.str());
  }
  return gen;
}

inline void apply_perturbation(TransformedSpec& t, const PerturbConfig& p) {
  const auto& ix = p.index;
  if (p.table == "drift_self")
    t.drift_self(ix[0], ix[1]) += p.delta;
  else if (p.table == "drift_cross")
    t.drift_cross(ix[0], ix[1]) += p.delta;
  else if (p.table == "cubic")
    t.cubic(ix[0], ix[1]) += p.delta;
  else if (p.table == "quartic")
    t.quartic(ix[0], ix[1], ix[2]) += p.delta;
  else if (p.table == "const_shift")
    t.const_shift[ix[0]] += p.delta;
  else
    throw Error(ErrorKind::Config, "verify.perturb.table: unknown table '" + p.table + "'");
}

/// Psi-system initial state from a config.
inline SimState psi_state(const RunConfig& c) {
  return {0.0, build_initial(c), SystemTag::Psi, build_spec(c), build_dispersion(c), c.density_floor};
}

/// Gauge image of a psi-system state, evolved with the transformed coefficients.
inline SimState phi_state(const SimState& psi, std::size_t anchor, const std::optional<PerturbConfig>& perturb = {}) {
  const auto gen = periodic_generator(psi.spec, to_hydro(psi.fields, psi.density_floor), psi.A, anchor);
  auto tspec = transformed_spec(psi.spec, psi.A);
  if (perturb) apply_perturbation(tspec, *perturb);
  return {psi.t, apply_gauge(psi.fields, gen).fields, SystemTag::Phi, tspec, psi.A, psi.density_floor};
}

/// Evolves the psi-system and its gauge image side by side and compares them
/// at every sample. The derivative family's generator carries a time-dependent
/// global phase, so its phase residual is anchor aligned.
inline VerifyOutcome run_verify(const RunConfig& c) {
  const auto psi0 = psi_state(c);
  const auto phi0 = phi_state(psi0, c.anchor, c.perturb);

  struct Sampled {
    double t;
    ComplexFieldSet fields;
  };
  auto collect = [&](const SimState& s0, std::vector<Sampled>& into) {
    return evolve(s0, c.time.dt, c.time.t_end, c.time.sample_every,
                  [&](const SimState& at, const DiagnosticsRecord&) { into.push_back({at.t, at.fields}); });
  };
  std::vector<Sampled> a, b;
  const auto run_psi = collect(psi0, a);
  collect(phi0, b);

  VerifyOutcome out;
  out.warnings = run_psi.warnings;
  const auto ref = std::holds_alternative<DerivativeSpec>(psi0.spec) ? PhaseReference::AnchorAligned
                                                                     : PhaseReference::Absolute;
  const std::size_t q = psi0.fields.species();
  for (std::size_t s = 0; s < a.size(); ++s) {
    EquivalenceSample row;
    row.t = a[s].t;
    row.density_diff.assign(q, 0.0);
    for (std::size_t k = 0; k < q; ++k)
      for (std::size_t i = 0; i < a[s].fields.grid().size(); ++i)
        row.density_diff[k] =
            std::max(row.density_diff[k], std::abs(std::norm(a[s].fields[k][i]) - std::norm(b[s].fields[k][i])));
    const auto h_psi = to_hydro(a[s].fields, c.density_floor);
    const auto h_phi = to_hydro(b[s].fields, c.density_floor);
    const auto gen = compute_generator(psi0.spec, h_psi, psi0.A, c.anchor);
    row.phase_residual = phase_relation_residual(h_psi, h_phi, gen, ref);
    out.samples.push_back(std::move(row));
  }
  for (double d : run_psi.records.back().norm_drift) out.norm_drift = std::max(out.norm_drift, std::abs(d));
  for (double d : out.samples.back().density_diff) out.equivalence_gap = std::max(out.equivalence_gap, d);
  for (double d : out.samples.back().phase_residual) out.phase_gap = std::max(out.phase_gap, d);
  out.within_tolerance = out.equivalence_gap < c.tolerance;
  return out;
}

}  // namespace colehopf
