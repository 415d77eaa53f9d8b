#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "colehopf/error.hpp"
#include "colehopf/fields.hpp"
#include "colehopf/grid.hpp"
#include "colehopf/nonlinearity.hpp"

namespace colehopf {

enum class SystemTag { Psi, Phi };

struct SimState {
  double t = 0.0;
  ComplexFieldSet fields;
  SystemTag system = SystemTag::Psi;
  NonlinearitySpec spec;
  DispersionMatrix A;
  double density_floor = kDefaultDensityFloor;
};

inline void validate(const SimState& s) {
  if (!(s.t >= 0.0)) throw Error(ErrorKind::Config, "state time must be >= 0");
  validate(s.spec);
  const auto q = s.fields.species();
  detail::check_species(s.spec, q, "state");
  if (s.A.size() != q)
    throw Error(ErrorKind::ShapeMismatch, "state: dispersion has " + std::to_string(s.A.size()) +
                                              " entries for " + std::to_string(q) + " species");
  if (s.system == SystemTag::Phi && !std::holds_alternative<TransformedSpec>(s.spec) &&
      !std::holds_alternative<LinearSpec>(s.spec))
    throw Error(ErrorKind::Config, "phi-system states need a real (transformed or linear) nonlinearity");
}

/// Largest dt for which RK4 keeps the spectral Laplacian's top mode stable:
/// |A| k_max^2 dt <= 2 sqrt(2).
inline double stability_bound(const Grid1D& g, const DispersionMatrix& A) {
  const double k_max = std::numbers::pi / g.dx();
  return 2.0 * std::numbers::sqrt2 / (A.max_abs() * k_max * k_max);
}

/// d fields / dt = i A f'' + i (W + i Wim) f. For the phi-system W is the
/// transformed real nonlinearity and Wim vanishes.
inline ComplexFieldSet rhs(const SimState& s) {
  const auto& g = s.fields.grid();
  const std::size_t q = s.fields.species();
  const std::size_t n = g.size();
  std::vector<ComplexField> d1(q);
  std::vector<ComplexField> d2(q);
  for (std::size_t k = 0; k < q; ++k) {
    auto pair = derivatives(s.fields[k], g);
    d1[k] = std::move(pair.first);
    d2[k] = std::move(pair.second);
  }
  const bool linear = std::holds_alternative<LinearSpec>(s.spec);
  std::vector<RealField> W;
  std::vector<RealField> Wim;
  if (!linear) {
    const auto grads = gradients(s.fields, d1, s.density_floor);
    W = eval_W(s.spec, grads);
    Wim = eval_Wim(s.spec, grads);
  }
  auto out = ComplexFieldSet::zeros(g, q);
  constexpr Complex I(0.0, 1.0);
  for (std::size_t k = 0; k < q; ++k) {
    const double a = s.A[k];
    for (std::size_t i = 0; i < n; ++i) {
      Complex v = I * a * d2[k][i];
      if (!linear) v += Complex(-Wim[k][i], W[k][i]) * s.fields[k][i];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(ErrorKind::NonFinite, "rhs: non-finite value at t=" + std::to_string(s.t));
      out[k][i] = v;
    }
  }
  return out;
}

namespace detail {

inline ComplexFieldSet axpy(const ComplexFieldSet& x, double a, const ComplexFieldSet& y) {
  auto out = x;
  for (std::size_t k = 0; k < x.species(); ++k)
    for (std::size_t i = 0; i < x.grid().size(); ++i) out[k][i] += a * y[k][i];
  return out;
}

}  // namespace detail

/// One classical RK4 step. Throws BlowUp on non-finite values.
inline SimState step(const SimState& s, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Config, "step: dt must be positive");
  auto stage = [&](const ComplexFieldSet& f, double t) {
    SimState tmp{t, f, s.system, s.spec, s.A, s.density_floor};
    return rhs(tmp);
  };
  try {
    const auto k1 = stage(s.fields, s.t);
    const auto k2 = stage(detail::axpy(s.fields, 0.5 * dt, k1), s.t + 0.5 * dt);
    const auto k3 = stage(detail::axpy(s.fields, 0.5 * dt, k2), s.t + 0.5 * dt);
    const auto k4 = stage(detail::axpy(s.fields, dt, k3), s.t + dt);
    auto next = s;
    next.t = s.t + dt;
    for (std::size_t k = 0; k < s.fields.species(); ++k)
      for (std::size_t i = 0; i < s.fields.grid().size(); ++i) {
        const auto v = s.fields[k][i] + dt / 6.0 * (k1[k][i] + 2.0 * k2[k][i] + 2.0 * k3[k][i] + k4[k][i]);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw Error(ErrorKind::NonFinite, "step: non-finite field");
        next.fields[k][i] = v;
      }
    return next;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonFinite) throw;
    throw Error(ErrorKind::BlowUp, "blow-up at t=" + std::to_string(s.t) + ": " + e.what());
  }
}

/// j_k = 2 (A_k rho_k S_k' + F_k).
inline std::vector<RealField> current(const NonlinearitySpec& spec, const HydroGradients& g,
                                      const DispersionMatrix& A) {
  const auto flux = eval_F(spec, g);
  std::vector<RealField> j(g.species(), RealField(g.grid.size()));
  for (std::size_t k = 0; k < g.species(); ++k)
    for (std::size_t i = 0; i < g.grid.size(); ++i)
      j[k][i] = 2.0 * (A[k] * g.rho_dphase[k][i] + flux[k][i]);
  return j;
}

inline std::vector<RealField> current_psi(const NonlinearitySpec& spec, const HydroFields& h,
                                          const DispersionMatrix& A) {
  return current(spec, gradients(h), A);
}

/// J_k = 2 A_k rho_k dS_k/dx, the bilinear current of the phi-system.
inline std::vector<RealField> current_phi(const HydroFields& h_phi, const DispersionMatrix& A) {
  return current(LinearSpec{h_phi.species()}, gradients(h_phi), A);
}

enum class TimeStencil { Central, Forward, Backward, TwoPoint };

namespace detail {

inline std::vector<RealField> densities(const ComplexFieldSet& f) {
  std::vector<RealField> rho(f.species(), RealField(f.grid().size()));
  for (std::size_t k = 0; k < f.species(); ++k)
    for (std::size_t i = 0; i < f.grid().size(); ++i) rho[k][i] = std::norm(f[k][i]);
  return rho;
}

// sup_x | drho_k/dt + d j_k / dx | at `at`, with drho/dt supplied.
inline std::vector<double> continuity_sup(const std::vector<RealField>& rho_dot, const SimState& at) {
  const auto& g = at.fields.grid();
  const auto j = current(at.spec, gradients(at.fields, at.density_floor), at.A);
  std::vector<double> out(at.fields.species(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto dj = derivative(j[k], g);
    for (std::size_t i = 0; i < g.size(); ++i) out[k] = std::max(out[k], std::abs(rho_dot[k][i] + dj[i]));
  }
  return out;
}

// Second-order finite-difference drho/dt at one of three equally spaced states.
inline std::vector<RealField> density_rate(const ComplexFieldSet& a, const ComplexFieldSet& b,
                                           const ComplexFieldSet& c, double dt, TimeStencil stencil) {
  const auto ra = densities(a);
  const auto rb = densities(b);
  const auto rc = densities(c);
  auto out = rb;
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t i = 0; i < out[k].size(); ++i) {
      switch (stencil) {
        case TimeStencil::Central: out[k][i] = (rc[k][i] - ra[k][i]) / (2.0 * dt); break;
        case TimeStencil::Forward: out[k][i] = (-3.0 * ra[k][i] + 4.0 * rb[k][i] - rc[k][i]) / (2.0 * dt); break;
        case TimeStencil::Backward: out[k][i] = (3.0 * rc[k][i] - 4.0 * rb[k][i] + ra[k][i]) / (2.0 * dt); break;
        case TimeStencil::TwoPoint: out[k][i] = (rb[k][i] - ra[k][i]) / dt; break;
      }
    }
  return out;
}

}  // namespace detail

/// Continuity residual at the middle of three equally spaced states: central
/// difference of rho plus the divergence of the system's current.
inline std::vector<double> continuity_residual(std::span<const SimState, 3> states) {
  const double h1 = states[1].t - states[0].t;
  const double h2 = states[2].t - states[1].t;
  if (!(h1 > 0.0) || std::abs(h2 - h1) > 1e-9 * h1)
    throw Error(ErrorKind::SpacingMismatch, "continuity_residual: states must be equally spaced in time");
  const auto rate = detail::density_rate(states[0].fields, states[1].fields, states[2].fields, h1,
                                         TimeStencil::Central);
  return detail::continuity_sup(rate, states[1]);
}

inline std::vector<double> continuity_residual(const std::array<SimState, 3>& states) {
  return continuity_residual(std::span<const SimState, 3>(states));
}

struct DiagnosticsRecord {
  double t = 0.0;
  std::vector<double> norms;
  std::vector<double> norm_drift;
  std::vector<double> continuity_residual;
  std::vector<double> energy_proxy;
};

/// Blow-up during evolve; carries the diagnostics gathered so far.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time, std::vector<DiagnosticsRecord> partial)
      : Error(ErrorKind::BlowUp, what), time_(time), partial_(std::move(partial)) {}

  double time() const noexcept { return time_; }
  const std::vector<DiagnosticsRecord>& partial() const noexcept { return partial_; }

 private:
  double time_;
  std::vector<DiagnosticsRecord> partial_;
};

struct EvolveResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::string> warnings;
};

/// Called with each sampled state, in time order, once its diagnostics are known.
using SampleObserver = std::function<void(const SimState&, const DiagnosticsRecord&)>;

inline constexpr double kBlowUpFactor = 1e6;

/// Repeated RK4 steps from initial.t to t_end. Samples every `sample_every`
/// steps plus the final state; each sample's continuity residual uses a
/// second-order time stencil (central inside, one-sided at the ends).
inline EvolveResult evolve(const SimState& initial, double dt, double t_end, std::int64_t sample_every,
                           const SampleObserver& observer = {}) {
  validate(initial);
  if (!(dt > 0.0)) throw Error(ErrorKind::Config, "evolve: dt must be positive");
  if (!(t_end > initial.t)) throw Error(ErrorKind::Config, "evolve: t_end must exceed the initial time");
  if (sample_every < 1) throw Error(ErrorKind::Config, "evolve: sample_every must be >= 1");

  const double span = t_end - initial.t;
  const auto n_steps = std::max<std::int64_t>(1, std::llround(span / dt));
  EvolveResult result{initial, {}, {}};
  if (std::abs(static_cast<double>(n_steps) * dt - span) > 1e-9 * span)
    result.warnings.push_back("t_end - t0 is not a multiple of dt; running " + std::to_string(n_steps) +
                              " steps");
  const double bound = stability_bound(initial.fields.grid(), initial.A);
  if (dt > bound)
    result.warnings.push_back("dt=" + std::to_string(dt) + " exceeds the RK4 stability bound " +
                              std::to_string(bound));

  const auto norms0 = norms(initial.fields);
  const double limit = kBlowUpFactor * initial.fields.max_abs();
  auto is_sample = [&](std::int64_t m) { return m % sample_every == 0 || m == n_steps; };

  auto record = [&](const SimState& at, const std::vector<RealField>& rate) {
    DiagnosticsRecord r;
    r.t = at.t;
    r.norms = norms(at.fields);
    r.norm_drift.resize(r.norms.size());
    for (std::size_t k = 0; k < r.norms.size(); ++k)
      r.norm_drift[k] = norms0[k] != 0.0 ? (r.norms[k] - norms0[k]) / norms0[k] : r.norms[k];
    r.continuity_residual = detail::continuity_sup(rate, at);
    r.energy_proxy.resize(r.norms.size());
    for (std::size_t k = 0; k < r.norms.size(); ++k) {
      const auto d = derivative(at.fields[k], at.fields.grid());
      double e = 0.0;
      for (const auto& v : d) e += std::norm(v);
      r.energy_proxy[k] = e * at.fields.grid().dx();
    }
    result.records.push_back(r);
    if (observer) observer(at, r);
  };

  std::deque<SimState> window{initial};
  for (std::int64_t n = 1; n <= n_steps; ++n) {
    try {
      auto next = step(window.back(), dt);
      next.t = initial.t + static_cast<double>(n) * dt;
      if (limit > 0.0 && next.fields.max_abs() > limit)
        throw Error(ErrorKind::BlowUp, "blow-up at t=" + std::to_string(next.t) +
                                           ": field magnitude exceeded 1e6 x initial maximum");
      window.push_back(std::move(next));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BlowUp) throw;
      throw BlowUpError(e.what(), initial.t + static_cast<double>(n) * dt, result.records);
    }
    if (window.size() > 3) window.pop_front();

    if (n_steps == 1) {
      const auto rate = detail::density_rate(window[0].fields, window[1].fields, window[1].fields, dt,
                                             TimeStencil::TwoPoint);
      record(window[0], rate);
      record(window[1], rate);
      break;
    }
    if (n == 2 && is_sample(0))
      record(window[0], detail::density_rate(window[0].fields, window[1].fields, window[2].fields, dt,
                                             TimeStencil::Forward));
    if (n >= 2 && n - 1 >= 1 && is_sample(n - 1))
      record(window[1], detail::density_rate(window[0].fields, window[1].fields, window[2].fields, dt,
                                             TimeStencil::Central));
    if (n == n_steps)
      record(window[2], detail::density_rate(window[0].fields, window[1].fields, window[2].fields, dt,
                                             TimeStencil::Backward));
  }
  result.final_state = window.back();
  return result;
}

struct ConvergenceRow {
  double dt = 0.0;
  std::int64_t steps = 0;
  double sup_diff = 0.0;
  double observed_order = std::numeric_limits<double>::quiet_NaN();  // NaN on the first row
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double dt_reference = 0.0;
  double observed_order = std::numeric_limits<double>::quiet_NaN();  // smallest pairwise order
  std::vector<std::string> warnings;
};

/// Fields after n plain RK4 steps of size dt (no diagnostics).
inline SimState advance(const SimState& initial, double dt, std::int64_t n) {
  SimState s = initial;
  for (std::int64_t m = 0; m < n; ++m) s = step(s, dt);
  return s;
}

/// Runs dt0, dt0/2, ... (levels values) to t_end and compares each against a
/// run at dt0 / reference_divisor. Orders are log2 of successive error ratios.
inline ConvergenceStudy self_convergence(const SimState& initial, double dt0, double t_end, int levels = 3,
                                         int reference_divisor = 16) {
  validate(initial);
  if (!(dt0 > 0.0)) throw Error(ErrorKind::Config, "self_convergence: dt must be positive");
  if (!(t_end > initial.t)) throw Error(ErrorKind::Config, "self_convergence: t_end must exceed the initial time");
  if (levels < 2) throw Error(ErrorKind::Config, "self_convergence: need at least two dt levels");
  if (reference_divisor < (1 << (levels - 1)))
    throw Error(ErrorKind::Config, "self_convergence: reference run must be finer than every level");

  ConvergenceStudy study;
  const double span = t_end - initial.t;
  const auto base_steps = std::max<std::int64_t>(1, std::llround(span / dt0));
  if (std::abs(static_cast<double>(base_steps) * dt0 - span) > 1e-9 * span)
    study.warnings.push_back("t_end - t0 is not a multiple of dt; dt adjusted to " +
                             std::to_string(span / static_cast<double>(base_steps)));
  const double dt = span / static_cast<double>(base_steps);
  const double bound = stability_bound(initial.fields.grid(), initial.A);
  if (dt > bound)
    study.warnings.push_back("dt=" + std::to_string(dt) + " exceeds the RK4 stability bound " +
                             std::to_string(bound));

  study.dt_reference = dt / reference_divisor;
  const auto reference = advance(initial, study.dt_reference, base_steps * reference_divisor);
  for (int level = 0; level < levels; ++level) {
    const std::int64_t factor = std::int64_t{1} << level;
    ConvergenceRow row;
    row.dt = dt / static_cast<double>(factor);
    row.steps = base_steps * factor;
    const auto run = advance(initial, row.dt, row.steps);
    for (std::size_t k = 0; k < run.fields.species(); ++k)
      for (std::size_t i = 0; i < run.fields.grid().size(); ++i)
        row.sup_diff = std::max(row.sup_diff, std::abs(run.fields[k][i] - reference.fields[k][i]));
    if (level > 0) {
      row.observed_order = std::log2(study.rows.back().sup_diff / row.sup_diff);
      if (!(row.observed_order >= study.observed_order)) study.observed_order = row.observed_order;
    }
    study.rows.push_back(row);
  }
  return study;
}

}  // namespace colehopf
