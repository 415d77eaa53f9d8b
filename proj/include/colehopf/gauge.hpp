#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "colehopf/error.hpp"
#include "colehopf/fields.hpp"
#include "colehopf/grid.hpp"
#include "colehopf/nonlinearity.hpp"

namespace colehopf {

/// Real generators sigma_k of the diagonal unitary map phi_k = exp(i sigma_k) psi_k.
///
/// sigma_k(x) = periodic[k](x) + ramp[k] * (x - x_anchor) and sigma_k(anchor) = 0.
/// The ramp is the secular part produced by integrating a field with nonzero
/// mean; it is kept apart because the grid cannot represent it periodically.
struct GaugeGenerator {
  Grid1D grid;
  std::vector<RealField> periodic;
  std::vector<double> ramp;
  std::size_t anchor = 0;
  NonlinearitySpec source;
  DispersionMatrix A;

  std::size_t species() const noexcept { return ramp.size(); }

  RealField values(std::size_t k) const {
    RealField s = periodic[k];
    const double x0 = grid.node(anchor);
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] += ramp[k] * (grid.node(i) - x0);
    return s;
  }

  /// d sigma_k / dx.
  std::vector<RealField> gradient() const {
    std::vector<RealField> out(species());
    for (std::size_t k = 0; k < species(); ++k) {
      out[k] = derivative(periodic[k], grid);
      for (auto& v : out[k]) v += ramp[k];
    }
    return out;
  }

  /// True when exp(i sigma_k) is grid-periodic, i.e. ramp * L is a multiple of 2 pi.
  bool ramp_periodic(std::size_t k, double tol = 1e-9) const {
    const double turns = ramp[k] * grid.length() / (2.0 * std::numbers::pi);
    return std::abs(turns - std::round(turns)) <= tol;
  }

  bool ramps_periodic(double tol = 1e-9) const {
    for (std::size_t k = 0; k < species(); ++k)
      if (!ramp_periodic(k, tol)) return false;
    return true;
  }
};

namespace detail {

inline void check_dispersion(const DispersionMatrix& A, std::size_t q, const char* who) {
  if (A.size() != q)
    throw Error(ErrorKind::ShapeMismatch, std::string(who) + ": dispersion has " +
                                              std::to_string(A.size()) + " entries, expected " +
                                              std::to_string(q));
}

// Sum of terms, with rounding residue of an exact cancellation mapped to 0.
inline double cancel_sum(std::initializer_list<double> terms) {
  double sum = 0.0, mag = 0.0;
  for (double t : terms) {
    sum += t;
    mag += std::abs(t);
  }
  return std::abs(sum) <= 8.0 * std::numeric_limits<double>::epsilon() * mag ? 0.0 : sum;
}

}  // namespace detail

/// sigma_k = antiderivative of F_k / (A_k rho_k), anchored at `anchor`.
/// The drift-cubic family uses its closed form -d_k (x - x_anchor) / (2 A_k).
inline GaugeGenerator compute_generator(const NonlinearitySpec& spec, const HydroFields& h,
                                        const DispersionMatrix& A, std::size_t anchor = 0) {
  const std::size_t q = h.species();
  detail::check_species(spec, q, "compute_generator");
  detail::check_dispersion(A, q, "compute_generator");
  const auto& g = h.grid;
  if (anchor >= g.size())
    throw Error(ErrorKind::AnchorOutOfRange, "compute_generator: anchor outside grid");

  GaugeGenerator gen{g, std::vector<RealField>(q, RealField(g.size(), 0.0)),
                     std::vector<double>(q, 0.0), anchor, spec, A};

  if (const auto* s = std::get_if<DriftCubicSpec>(&spec)) {
    for (std::size_t k = 0; k < q; ++k) gen.ramp[k] = -0.5 * s->drift[k] / A[k];
  } else if (std::holds_alternative<DerivativeSpec>(spec)) {
    const auto grads = gradients(h);
    const auto flux = eval_F(spec, grads);
    for (std::size_t k = 0; k < q; ++k) {
      const bool trivial = std::all_of(flux[k].begin(), flux[k].end(), [](double v) { return v == 0.0; });
      if (trivial) continue;
      detail::require_live(grads, k, "compute_generator");
      RealField integrand(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) integrand[i] = flux[k][i] / (A[k] * h.rho[k][i]);
      auto parts = antiderivative_parts(integrand, g, anchor);
      gen.periodic[k] = std::move(parts.periodic);
      gen.ramp[k] = parts.slope;
    }
  }
  return gen;
}

/// Result of applying a gauge map; `periodic[k]` is false when species k
/// picked up a phase ramp that does not close over the domain.
struct GaugedFields {
  ComplexFieldSet fields;
  std::vector<bool> periodic;

  bool all_periodic() const {
    return std::all_of(periodic.begin(), periodic.end(), [](bool b) { return b; });
  }
};

namespace detail {

inline ComplexFieldSet rotate(const ComplexFieldSet& f, const GaugeGenerator& gen, double sign,
                              const char* who) {
  if (f.species() != gen.species() || !(f.grid() == gen.grid))
    throw Error(ErrorKind::ShapeMismatch, std::string(who) + ": fields and generator differ in shape");
  auto out = f;
  for (std::size_t k = 0; k < f.species(); ++k) {
    const auto sigma = gen.values(k);
    for (std::size_t i = 0; i < f.grid().size(); ++i) out[k][i] *= std::polar(1.0, sign * sigma[i]);
  }
  return out;
}

}  // namespace detail

/// phi_k = exp(i sigma_k) psi_k.
inline GaugedFields apply_gauge(const ComplexFieldSet& psi, const GaugeGenerator& gen) {
  GaugedFields out{detail::rotate(psi, gen, 1.0, "apply_gauge"), std::vector<bool>(gen.species())};
  for (std::size_t k = 0; k < gen.species(); ++k) out.periodic[k] = gen.ramp_periodic(k);
  return out;
}

/// psi_k = exp(-i sigma_k) phi_k.
inline ComplexFieldSet invert_gauge(const ComplexFieldSet& phi, const GaugeGenerator& gen) {
  return detail::rotate(phi, gen, -1.0, "invert_gauge");
}

/// Hydro fields of phi from those of psi: same densities, phases S_k + sigma_k.
inline HydroFields gauge_hydro(const HydroFields& h_psi, const GaugeGenerator& gen) {
  detail::check_hydro_shape(h_psi, gen.species(), "gauge_hydro");
  auto out = h_psi;
  for (std::size_t k = 0; k < gen.species(); ++k) {
    const auto sigma = gen.values(k);
    for (std::size_t i = 0; i < h_psi.grid.size(); ++i) out.phase[k][i] += sigma[i];
    out.phase_slope[k] += gen.ramp[k];
  }
  return out;
}

enum class PhaseReference {
  Absolute,       ///< distance of S_phi - S_psi - sigma to 2 pi Z
  AnchorAligned,  ///< same, after removing its value at the anchor node (a global phase)
};

/// Per-species sup over x of the distance of (S_phi - S_psi - sigma) to 2 pi Z.
/// Vacuum nodes of either state are skipped.
inline std::vector<double> phase_relation_residual(const HydroFields& h_psi, const HydroFields& h_phi,
                                                   const GaugeGenerator& gen,
                                                   PhaseReference ref = PhaseReference::Absolute) {
  const std::size_t q = gen.species();
  detail::check_hydro_shape(h_psi, q, "phase_relation_residual");
  detail::check_hydro_shape(h_phi, q, "phase_relation_residual");
  std::vector<double> out(q, 0.0);
  for (std::size_t k = 0; k < q; ++k) {
    const auto sigma = gen.values(k);
    const double offset = ref == PhaseReference::AnchorAligned
                              ? h_phi.phase[k][gen.anchor] - h_psi.phase[k][gen.anchor] - sigma[gen.anchor]
                              : 0.0;
    for (std::size_t i = 0; i < h_psi.grid.size(); ++i) {
      if (h_psi.vacuum[k][i] || h_phi.vacuum[k][i]) continue;
      const double d = h_phi.phase[k][i] - h_psi.phase[k][i] - sigma[i] - offset;
      out[k] = std::max(out[k], std::abs(detail::wrap_to_pi(d)));
    }
  }
  return out;
}

/// d/dx log f_k = f_k' / f_k for fields bounded away from zero.
inline std::vector<ComplexField> log_derivative(const ComplexFieldSet& f, double floor = kDefaultDensityFloor) {
  std::vector<ComplexField> out(f.species());
  for (std::size_t k = 0; k < f.species(); ++k) {
    double peak = 0.0;
    for (const auto& v : f[k]) peak = std::max(peak, std::norm(v));
    const auto df = derivative(f[k], f.grid());
    out[k].resize(f.grid().size());
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
      if (!(std::norm(f[k][i]) > floor * peak))
        throw Error(ErrorKind::Vacuum, "log_derivative: species " + std::to_string(k) + " vanishes");
      out[k][i] = df[i] / f[k][i];
    }
  }
  return out;
}

/// Generalized Cole-Hopf functional G_k = (log psi_k)' + i F_k / (A_k rho_k);
/// the gauge-transformed field satisfies (log phi_k)' = G_k.
inline std::vector<ComplexField> cole_hopf_G(const ComplexFieldSet& psi, const NonlinearitySpec& spec,
                                             const DispersionMatrix& A) {
  const std::size_t q = psi.species();
  detail::check_species(spec, q, "cole_hopf_G");
  detail::check_dispersion(A, q, "cole_hopf_G");
  auto out = log_derivative(psi);
  const auto flux = eval_F(spec, gradients(psi));
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t i = 0; i < psi.grid().size(); ++i)
      out[k][i] += Complex(0.0, flux[k][i] / (A[k] * std::norm(psi[k][i])));
  return out;
}

/// Solves (log phi)' = G with phi(anchor) = phi_anchor: phi = phi_anchor exp(int_anchor^x G).
/// With G = psi this is the classical Cole-Hopf map.
inline ComplexField integrate_log_derivative(const ComplexField& G, const Grid1D& grid, std::size_t anchor,
                                             Complex phi_anchor = 1.0) {
  detail::check_length(G.size(), grid, "integrate_log_derivative");
  RealField re(G.size());
  RealField im(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    re[i] = G[i].real();
    im[i] = G[i].imag();
  }
  const auto int_re = antiderivative(re, grid, anchor);
  const auto int_im = antiderivative(im, grid, anchor);
  ComplexField phi(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) phi[i] = phi_anchor * std::exp(Complex(int_re[i], int_im[i]));
  return phi;
}

/// sup | d/dx (Fy/rho) - d/dy (Fx/rho) | on a 2-D sampling; zero iff the
/// multi-dimensional generator exists. Uses non-periodic high-order stencils,
/// so linear fields such as (-y, x) are differentiated exactly.
inline double curl_residual_2d(std::span<const double> Fx, std::span<const double> Fy,
                               std::span<const double> rho, const Grid2D& grid2) {
  const std::size_t nx = grid2.x.size();
  const std::size_t ny = grid2.y.size();
  if (Fx.size() != grid2.size() || Fy.size() != grid2.size() || rho.size() != grid2.size())
    throw Error(ErrorKind::ShapeMismatch, "curl_residual_2d: field sizes do not match the 2-D grid");
  for (double r : rho)
    if (!(r > 0.0)) throw Error(ErrorKind::Vacuum, "curl_residual_2d: density must be positive");

  RealField vx(grid2.size());
  RealField vy(grid2.size());
  for (std::size_t p = 0; p < grid2.size(); ++p) {
    vx[p] = Fx[p] / rho[p];
    vy[p] = Fy[p] / rho[p];
  }

  RealField dvy_dx(grid2.size());
  RealField line(nx);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    std::copy_n(vy.begin() + static_cast<std::ptrdiff_t>(iy * nx), nx, line.begin());
    const auto d = stencil_derivative(line, grid2.x.dx());
    std::copy(d.begin(), d.end(), dvy_dx.begin() + static_cast<std::ptrdiff_t>(iy * nx));
  }
  double residual = 0.0;
  RealField column(ny);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) column[iy] = vx[iy * nx + ix];
    const auto d = stencil_derivative(column, grid2.y.dx());
    for (std::size_t iy = 0; iy < ny; ++iy)
      residual = std::max(residual, std::abs(dvy_dx[iy * nx + ix] - d[iy]));
  }
  return residual;
}

/// Closed-form transformed coefficients of the drift-cubic family. The cubic
/// couplings pass through and the drift becomes the constant +d_k^2 / (4 A_k).
inline TransformedSpec transformed_spec_drift(const DriftCubicSpec& spec, const DispersionMatrix& A) {
  validate(spec);
  const std::size_t q = spec.q();
  detail::check_dispersion(A, q, "transformed_spec_drift");
  auto out = TransformedSpec::zeros(q);
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t j = 0; j < q; ++j) out.cubic(k, j) = j == k ? -spec.gamma[k] : -2.0 * spec.gamma[j];
    out.const_shift[k] = 0.25 * spec.drift[k] * spec.drift[k] / A[k];
  }
  return out;
}

/// Closed-form transformed coefficients of the derivative family:
///   drift_self(k,j)  = beta_kj + 2 delta_kj
///   drift_cross(k,j) = gamma_kj - 2 (A_j / A_k) delta_kj
///   quartic(k,j,i)   = -[delta_kj (delta_ki + beta_ki) / A_k + gamma_kj delta_ji / A_j - lambda_kji]
inline TransformedSpec transformed_spec_derivative(const DerivativeSpec& spec, const DispersionMatrix& A) {
  validate(spec);
  const std::size_t q = spec.q();
  detail::check_dispersion(A, q, "transformed_spec_derivative");
  auto out = TransformedSpec::zeros(q);
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t j = 0; j < q; ++j) {
      out.drift_self(k, j) = detail::cancel_sum({spec.beta(k, j), 2.0 * spec.delta(k, j)});
      out.drift_cross(k, j) = detail::cancel_sum({spec.gamma(k, j), -2.0 * A[j] * spec.delta(k, j) / A[k]});
      for (std::size_t i = 0; i < q; ++i)
        out.quartic(k, j, i) = 0.0 - detail::cancel_sum({spec.delta(k, j) * spec.delta(k, i) / A[k],
                                                    spec.delta(k, j) * spec.beta(k, i) / A[k],
                                                    spec.gamma(k, j) * spec.delta(j, i) / A[j],
                                                    -spec.lambda(k, j, i)});
    }
  }
  return out;
}

/// Transformed coefficients for whichever family `spec` belongs to.
inline TransformedSpec transformed_spec(const NonlinearitySpec& spec, const DispersionMatrix& A) {
  if (const auto* s = std::get_if<DriftCubicSpec>(&spec)) return transformed_spec_drift(*s, A);
  if (const auto* s = std::get_if<DerivativeSpec>(&spec)) return transformed_spec_derivative(*s, A);
  if (const auto* s = std::get_if<TransformedSpec>(&spec)) return *s;
  return TransformedSpec::zeros(species(spec));
}

/// R_k = W_k - A_k (sigma_k')^2 + J_k sigma_k' / rho_k + d sigma_k / dt, with W
/// evaluated at the psi-phases S = S_phi - sigma and J the phi-system current.
///
/// d sigma / dt vanishes for the drift-cubic family. For the derivative family
/// the continuity equations give -(1/A_k) sum_j delta_kj (J_j(x) - J_j(anchor)).
inline std::vector<RealField> eval_R_numeric(const NonlinearitySpec& spec, const HydroFields& h_phi,
                                             const GaugeGenerator& gen, const DispersionMatrix& A,
                                             const std::vector<RealField>& J) {
  const std::size_t q = h_phi.species();
  detail::check_species(spec, q, "eval_R_numeric");
  detail::check_dispersion(A, q, "eval_R_numeric");
  if (gen.species() != q || J.size() != q)
    throw Error(ErrorKind::ShapeMismatch, "eval_R_numeric: generator/current species mismatch");
  const auto& g = h_phi.grid;
  const std::size_t n = g.size();
  for (const auto& row : J) detail::check_length(row.size(), g, "eval_R_numeric");

  auto grads = gradients(h_phi);
  const auto dsigma = gen.gradient();
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      grads.dphase[k][i] -= dsigma[k][i];
      grads.rho_dphase[k][i] = grads.rho[k][i] * grads.dphase[k][i];
    }
  auto R = eval_W(spec, grads);

  const auto* deriv = std::get_if<DerivativeSpec>(&spec);
  for (std::size_t k = 0; k < q; ++k) {
    const bool moving = std::any_of(dsigma[k].begin(), dsigma[k].end(), [](double v) { return v != 0.0; });
    if (moving) detail::require_live(grads, k, "eval_R_numeric");
    for (std::size_t i = 0; i < n; ++i) {
      const double ds = dsigma[k][i];
      R[k][i] += -A[k] * ds * ds + (moving ? J[k][i] * ds / grads.rho[k][i] : 0.0);
    }
    if (deriv) {
      for (std::size_t j = 0; j < q; ++j) {
        const double c = deriv->delta(k, j) / A[k];
        if (c == 0.0) continue;
        const double at_anchor = J[j][gen.anchor];
        for (std::size_t i = 0; i < n; ++i) R[k][i] -= c * (J[j][i] - at_anchor);
      }
    }
  }
  return R;
}

}  // namespace colehopf
