#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "colehopf/error.hpp"
#include "colehopf/grid.hpp"

namespace colehopf {

/// Default vacuum threshold, relative to each species' peak density.
inline constexpr double kDefaultDensityFloor = 1e-12;

/// q complex fields sampled on a shared grid (psi or phi).
class ComplexFieldSet {
 public:
  ComplexFieldSet(Grid1D grid, std::vector<ComplexField> data)
      : grid_(grid), data_(std::move(data)) {
    if (data_.empty()) throw Error(ErrorKind::ShapeMismatch, "field set needs at least one species");
    for (const auto& row : data_) detail::check_length(row.size(), grid_, "field set");
  }

  static ComplexFieldSet zeros(Grid1D grid, std::size_t q) {
    return {grid, std::vector<ComplexField>(q, ComplexField(grid.size()))};
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t species() const noexcept { return data_.size(); }

  ComplexField& operator[](std::size_t k) { return data_[k]; }
  const ComplexField& operator[](std::size_t k) const { return data_[k]; }

  const std::vector<ComplexField>& rows() const noexcept { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& row : data_)
      for (const auto& v : row) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid1D grid_;
  std::vector<ComplexField> data_;
};

/// Diagonal dispersion coefficients A_k; all nonzero.
class DispersionMatrix {
 public:
  explicit DispersionMatrix(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorKind::ShapeMismatch, "dispersion needs at least one entry");
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (!std::isfinite(coeffs_[k]))
        throw Error(ErrorKind::NonFinite, "dispersion A[" + std::to_string(k) + "] is not finite");
      if (coeffs_[k] == 0.0)
        throw Error(ErrorKind::ZeroDispersion, "dispersion A[" + std::to_string(k) + "] is zero");
    }
  }

  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t k) const { return coeffs_[k]; }
  const std::vector<double>& values() const noexcept { return coeffs_; }

  double max_abs() const {
    double m = 0.0;
    for (double a : coeffs_) m = std::max(m, std::abs(a));
    return m;
  }

  friend bool operator==(const DispersionMatrix&, const DispersionMatrix&) = default;

 private:
  std::vector<double> coeffs_;
};

/// Densities and unwrapped phases of a field set.
///
/// `phase_slope[k]` is the secular part of the phase: phase[k](x) minus
/// phase_slope[k] * (x - x_min) is grid-periodic. For fields obtained from a
/// periodic psi the slope is 2 pi w / L for an integer winding w; gauge maps
/// add the generator's ramp to it.
struct HydroFields {
  Grid1D grid;
  std::vector<RealField> rho;
  std::vector<RealField> phase;
  std::vector<double> phase_slope;
  std::vector<std::vector<bool>> vacuum;

  std::size_t species() const noexcept { return rho.size(); }

  bool has_vacuum(std::size_t k) const {
    return std::find(vacuum[k].begin(), vacuum[k].end(), true) != vacuum[k].end();
  }
};

namespace detail {

inline double wrap_to_pi(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  return a;
}

inline void check_hydro_shape(const HydroFields& h, std::size_t q, const char* who) {
  if (h.species() != q || h.phase.size() != q || h.phase_slope.size() != q || h.vacuum.size() != q)
    throw Error(ErrorKind::ShapeMismatch, std::string(who) + ": expected " + std::to_string(q) +
                                              " species, got " + std::to_string(h.species()));
  for (std::size_t k = 0; k < q; ++k) {
    check_length(h.rho[k].size(), h.grid, who);
    check_length(h.phase[k].size(), h.grid, who);
    check_length(h.vacuum[k].size(), h.grid, who);
  }
}

// Unwraps arg(psi) over non-vacuum nodes and linearly fills vacuum nodes,
// closing the gap across the periodic wrap. Returns the winding slope.
inline double unwrap_phase(const ComplexField& psi, const std::vector<bool>& vacuum,
                           const Grid1D& g, RealField& phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n = g.size();
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n; ++i)
    if (!vacuum[i]) live.push_back(i);

  phase.assign(n, 0.0);
  phase[live.front()] = std::arg(psi[live.front()]);
  for (std::size_t a = 1; a < live.size(); ++a) {
    const auto prev = live[a - 1];
    const auto cur = live[a];
    phase[cur] = phase[prev] + wrap_to_pi(std::arg(psi[cur]) - phase[prev]);
  }

  const auto first = live.front();
  const auto last = live.back();
  // Phase continued one period past the last live node, at x(first) + L.
  const double closing = phase[last] + wrap_to_pi(phase[first] - phase[last]);
  const double turn = closing - phase[first];

  auto fill = [&](double xa, double sa, double xb, double sb, std::size_t i) {
    const double x = g.node(i);
    phase[i] = sa + (sb - sa) * (x - xa) / (xb - xa);
  };
  for (std::size_t a = 1; a < live.size(); ++a)
    for (std::size_t i = live[a - 1] + 1; i < live[a]; ++i)
      fill(g.node(live[a - 1]), phase[live[a - 1]], g.node(live[a]), phase[live[a]], i);
  const double L = g.length();
  for (std::size_t i = last + 1; i < n; ++i)
    fill(g.node(last), phase[last], g.node(first) + L, closing, i);
  for (std::size_t i = 0; i < first; ++i)
    fill(g.node(last) - L, phase[last] - turn, g.node(first), phase[first], i);

  const double winding = std::round(turn / two_pi);
  return two_pi * winding / L;
}

}  // namespace detail

/// rho_k = |psi_k|^2 and S_k = arg psi_k unwrapped from node 0. Nodes whose
/// density is below floor * max(rho_k) are flagged as vacuum and their phase
/// is interpolated from the neighbouring live nodes.
inline HydroFields to_hydro(const ComplexFieldSet& psi, double floor = kDefaultDensityFloor) {
  if (!(floor >= 0.0)) throw Error(ErrorKind::Vacuum, "to_hydro: density floor must be >= 0");
  const auto& g = psi.grid();
  const std::size_t q = psi.species();
  HydroFields h{g, std::vector<RealField>(q), std::vector<RealField>(q), std::vector<double>(q),
                std::vector<std::vector<bool>>(q)};
  for (std::size_t k = 0; k < q; ++k) {
    auto& rho = h.rho[k];
    rho.resize(g.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      rho[i] = std::norm(psi[k][i]);
      peak = std::max(peak, rho[i]);
    }
    if (!(peak > 0.0))
      throw Error(ErrorKind::Vacuum, "to_hydro: species " + std::to_string(k) + " is entirely vacuum");
    const double threshold = floor * peak;
    h.vacuum[k].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) h.vacuum[k][i] = rho[i] < threshold;
    h.phase_slope[k] = detail::unwrap_phase(psi[k], h.vacuum[k], g, h.phase[k]);
  }
  return h;
}

/// psi_k = sqrt(rho_k) exp(i S_k).
inline ComplexFieldSet from_hydro(const HydroFields& h) {
  detail::check_hydro_shape(h, h.species(), "from_hydro");
  std::vector<ComplexField> out(h.species(), ComplexField(h.grid.size()));
  for (std::size_t k = 0; k < h.species(); ++k) {
    for (std::size_t i = 0; i < h.grid.size(); ++i) {
      const double r = h.rho[k][i];
      if (r < 0.0)
        throw Error(ErrorKind::NegativeDensity,
                    "from_hydro: negative density in species " + std::to_string(k));
      out[k][i] = std::polar(std::sqrt(r), h.phase[k][i]);
    }
  }
  return {h.grid, std::move(out)};
}

/// Hydro fields built directly from densities and phases (no vacuum nodes);
/// the secular slope is inferred the same way to_hydro does.
inline HydroFields make_hydro(Grid1D grid, std::vector<RealField> rho, std::vector<RealField> phase) {
  const std::size_t q = rho.size();
  if (phase.size() != q) throw Error(ErrorKind::ShapeMismatch, "make_hydro: rho/phase species mismatch");
  HydroFields h{grid, std::move(rho), std::move(phase), std::vector<double>(q),
                std::vector<std::vector<bool>>(q, std::vector<bool>(grid.size(), false))};
  detail::check_hydro_shape(h, q, "make_hydro");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < q; ++k) {
    const auto& s = h.phase[k];
    const double closing = s.back() + detail::wrap_to_pi(s.front() - s.back());
    h.phase_slope[k] = two_pi * std::round((closing - s.front()) / two_pi) / grid.length();
  }
  return h;
}

/// dS_k/dx: spectral derivative of the periodic part plus the secular slope.
inline std::vector<RealField> phase_gradient(const HydroFields& h) {
  const auto& g = h.grid;
  std::vector<RealField> out(h.species());
  for (std::size_t k = 0; k < h.species(); ++k) {
    RealField periodic(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      periodic[i] = h.phase[k][i] - h.phase_slope[k] * (g.node(i) - g.x_min());
    out[k] = derivative(periodic, g);
    for (auto& v : out[k]) v += h.phase_slope[k];
  }
  return out;
}

inline std::vector<double> norms(const HydroFields& h) {
  std::vector<double> n(h.species());
  for (std::size_t k = 0; k < h.species(); ++k) n[k] = integrate(h.rho[k], h.grid);
  return n;
}

inline std::vector<double> norms(const ComplexFieldSet& psi) {
  std::vector<double> n(psi.species());
  for (std::size_t k = 0; k < psi.species(); ++k) {
    double sum = 0.0;
    for (const auto& v : psi[k]) sum += std::norm(v);
    n[k] = sum * psi.grid().dx();
  }
  return n;
}

}  // namespace colehopf
