#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "colehopf/error.hpp"
#include "colehopf/fields.hpp"
#include "colehopf/grid.hpp"
#include "colehopf/tensor.hpp"

namespace colehopf {

struct LinearSpec {
  std::size_t q = 1;
  friend bool operator==(const LinearSpec&, const LinearSpec&) = default;
};

/// Constant-drift cubic family: W_k = d_k S_k' - g_k rho_k - 2 sum_{j!=k} g_j rho_j,
/// imaginary part -d_k/2 (log rho_k)'.
struct DriftCubicSpec {
  std::vector<double> drift;
  std::vector<double> gamma;

  std::size_t q() const noexcept { return drift.size(); }
  friend bool operator==(const DriftCubicSpec&, const DriftCubicSpec&) = default;
};

/// 1-D derivative family parameterised by beta, gamma, delta (q x q) and lambda (q x q x q).
struct DerivativeSpec {
  Matrix beta;
  Matrix gamma;
  Matrix delta;
  Tensor3 lambda;

  static DerivativeSpec zeros(std::size_t q) { return {Matrix(q), Matrix(q), Matrix(q), Tensor3(q)}; }

  std::size_t q() const noexcept { return delta.size(); }
  friend bool operator==(const DerivativeSpec&, const DerivativeSpec&) = default;
};

/// Purely real nonlinearity of a gauge-transformed system:
///   R_k = sum_j rho_j (drift_self(k,j) S_k' + drift_cross(k,j) S_j')
///       + sum_j cubic(k,j) rho_j + sum_{j,i} quartic(k,j,i) rho_j rho_i + const_shift_k.
struct TransformedSpec {
  Matrix drift_self;
  Matrix drift_cross;
  Matrix cubic;
  Tensor3 quartic;
  std::vector<double> const_shift;

  static TransformedSpec zeros(std::size_t q) {
    return {Matrix(q), Matrix(q), Matrix(q), Tensor3(q), std::vector<double>(q, 0.0)};
  }

  std::size_t q() const noexcept { return const_shift.size(); }

  bool is_zero() const {
    auto zero = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    };
    return zero(drift_self.values()) && zero(drift_cross.values()) && zero(cubic.values()) &&
           zero(quartic.values()) && zero(const_shift);
  }

  friend bool operator==(const TransformedSpec&, const TransformedSpec&) = default;
};

using NonlinearitySpec = std::variant<LinearSpec, DriftCubicSpec, DerivativeSpec, TransformedSpec>;

inline std::size_t species(const NonlinearitySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, LinearSpec>)
          return s.q;
        else
          return s.q();
      },
      spec);
}

inline const char* family_name(const NonlinearitySpec& spec) {
  switch (spec.index()) {
    case 0: return "linear";
    case 1: return "drift_cubic";
    case 2: return "derivative";
    default: return "transformed";
  }
}

/// Throws ShapeMismatch / NonFinite when the coefficient tables are inconsistent.
inline void validate(const NonlinearitySpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ShapeMismatch, what); };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearSpec>) {
          if (s.q == 0) fail("linear spec needs q >= 1");
        } else if constexpr (std::is_same_v<T, DriftCubicSpec>) {
          if (s.drift.empty()) fail("drift-cubic spec needs q >= 1");
          if (s.gamma.size() != s.drift.size()) fail("drift-cubic spec: gamma/drift length mismatch");
          for (std::size_t k = 0; k < s.q(); ++k)
            if (!std::isfinite(s.drift[k]) || !std::isfinite(s.gamma[k]))
              throw Error(ErrorKind::NonFinite, "drift-cubic spec has non-finite entries");
        } else if constexpr (std::is_same_v<T, DerivativeSpec>) {
          const auto q = s.q();
          if (q == 0) fail("derivative spec needs q >= 1");
          if (s.beta.size() != q || s.gamma.size() != q || s.lambda.size() != q)
            fail("derivative spec: beta/gamma/delta/lambda shapes differ");
          if (!s.beta.all_finite() || !s.gamma.all_finite() || !s.delta.all_finite() ||
              !s.lambda.all_finite())
            throw Error(ErrorKind::NonFinite, "derivative spec has non-finite entries");
        } else {
          const auto q = s.q();
          if (q == 0) fail("transformed spec needs q >= 1");
          if (s.drift_self.size() != q || s.drift_cross.size() != q || s.cubic.size() != q ||
              s.quartic.size() != q)
            fail("transformed spec: table shapes differ");
          if (!s.drift_self.all_finite() || !s.drift_cross.all_finite() || !s.cubic.all_finite() ||
              !s.quartic.all_finite())
            throw Error(ErrorKind::NonFinite, "transformed spec has non-finite entries");
        }
      },
      spec);
}

/// Pointwise kinematic inputs of every nonlinearity: rho, rho', S' and the
/// current density rho S'. Vacuum nodes carry S' = 0.
struct HydroGradients {
  Grid1D grid;
  std::vector<RealField> rho;
  std::vector<RealField> drho;
  std::vector<RealField> dphase;
  std::vector<RealField> rho_dphase;
  std::vector<std::vector<bool>> vacuum;

  std::size_t species() const noexcept { return rho.size(); }

  bool has_vacuum(std::size_t k) const {
    return std::find(vacuum[k].begin(), vacuum[k].end(), true) != vacuum[k].end();
  }
};

inline HydroGradients gradients(const HydroFields& h) {
  detail::check_hydro_shape(h, h.species(), "gradients");
  const std::size_t q = h.species();
  HydroGradients out{h.grid, h.rho, std::vector<RealField>(q), phase_gradient(h),
                     std::vector<RealField>(q), h.vacuum};
  for (std::size_t k = 0; k < q; ++k) {
    out.drho[k] = derivative(h.rho[k], h.grid);
    out.rho_dphase[k].resize(h.grid.size());
    for (std::size_t i = 0; i < h.grid.size(); ++i) {
      if (h.vacuum[k][i]) out.dphase[k][i] = 0.0;
      out.rho_dphase[k][i] = h.rho[k][i] * out.dphase[k][i];
    }
  }
  return out;
}

/// Gradients straight from the complex fields, given their first derivatives:
/// rho S' = Im(conj(psi) psi') avoids differentiating a wrapped phase.
inline HydroGradients gradients(const ComplexFieldSet& psi, const std::vector<ComplexField>& dpsi,
                                double floor = kDefaultDensityFloor) {
  const auto& g = psi.grid();
  const std::size_t q = psi.species();
  const std::size_t n = g.size();
  HydroGradients out{g,
                     std::vector<RealField>(q, RealField(n)),
                     {},
                     std::vector<RealField>(q, RealField(n)),
                     std::vector<RealField>(q, RealField(n)),
                     std::vector<std::vector<bool>>(q, std::vector<bool>(n))};
  out.drho.resize(q);
  for (std::size_t k = 0; k < q; ++k) {
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.rho[k][i] = std::norm(psi[k][i]);
      peak = std::max(peak, out.rho[k][i]);
    }
    const double threshold = floor * peak;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = out.rho[k][i];
      const bool vac = !(r > 0.0) || r < threshold;
      out.vacuum[k][i] = vac;
      out.rho_dphase[k][i] = std::imag(std::conj(psi[k][i]) * dpsi[k][i]);
      out.dphase[k][i] = vac ? 0.0 : out.rho_dphase[k][i] / r;
    }
    out.drho[k] = derivative(out.rho[k], g);
  }
  return out;
}

inline HydroGradients gradients(const ComplexFieldSet& psi, double floor = kDefaultDensityFloor) {
  std::vector<ComplexField> dpsi(psi.species());
  for (std::size_t k = 0; k < psi.species(); ++k) dpsi[k] = derivative(psi[k], psi.grid());
  return gradients(psi, dpsi, floor);
}

namespace detail {

inline void check_species(const NonlinearitySpec& spec, std::size_t q, const char* who) {
  if (species(spec) != q)
    throw Error(ErrorKind::ShapeMismatch, std::string(who) + ": spec has " +
                                              std::to_string(species(spec)) + " species, fields have " +
                                              std::to_string(q));
}

inline void require_live(const HydroGradients& g, std::size_t k, const char* who) {
  if (g.has_vacuum(k))
    throw Error(ErrorKind::Vacuum, std::string(who) + ": species " + std::to_string(k) +
                                       " has vacuum nodes where the nonlinearity divides by rho");
}

inline void add_density_polynomial(const Matrix& cubic, const Tensor3& quartic,
                                   const std::vector<double>& shift, const HydroGradients& g,
                                   std::vector<RealField>& out) {
  const std::size_t q = g.species();
  const std::size_t n = g.grid.size();
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[k][i] += shift[k];
    for (std::size_t j = 0; j < q; ++j) {
      if (cubic(k, j) != 0.0)
        for (std::size_t i = 0; i < n; ++i) out[k][i] += cubic(k, j) * g.rho[j][i];
      for (std::size_t l = 0; l < q; ++l) {
        const double c = quartic(k, j, l);
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[k][i] += c * g.rho[j][i] * g.rho[l][i];
      }
    }
  }
}

}  // namespace detail

/// Real part W_k of the nonlinearity (R_k for a transformed spec).
inline std::vector<RealField> eval_W(const NonlinearitySpec& spec, const HydroGradients& g) {
  const std::size_t q = g.species();
  detail::check_species(spec, q, "eval_W");
  const std::size_t n = g.grid.size();
  std::vector<RealField> out(q, RealField(n, 0.0));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DriftCubicSpec>) {
          for (std::size_t k = 0; k < q; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
              double w = s.drift[k] * g.dphase[k][i] - s.gamma[k] * g.rho[k][i];
              for (std::size_t j = 0; j < q; ++j)
                if (j != k) w -= 2.0 * s.gamma[j] * g.rho[j][i];
              out[k][i] = w;
            }
          }
        } else if constexpr (std::is_same_v<T, DerivativeSpec>) {
          for (std::size_t k = 0; k < q; ++k)
            for (std::size_t j = 0; j < q; ++j)
              for (std::size_t i = 0; i < n; ++i)
                out[k][i] += s.beta(k, j) * g.rho[j][i] * g.dphase[k][i] +
                             s.gamma(k, j) * g.rho_dphase[j][i];
          detail::add_density_polynomial(Matrix(q), s.lambda, std::vector<double>(q, 0.0), g, out);
        } else if constexpr (std::is_same_v<T, TransformedSpec>) {
          for (std::size_t k = 0; k < q; ++k)
            for (std::size_t j = 0; j < q; ++j)
              for (std::size_t i = 0; i < n; ++i)
                out[k][i] += s.drift_self(k, j) * g.rho[j][i] * g.dphase[k][i] +
                             s.drift_cross(k, j) * g.rho_dphase[j][i];
          detail::add_density_polynomial(s.cubic, s.quartic, s.const_shift, g, out);
        }
      },
      spec);
  return out;
}

/// Imaginary part of the nonlinearity, in its closed form.
inline std::vector<RealField> eval_Wim(const NonlinearitySpec& spec, const HydroGradients& g) {
  const std::size_t q = g.species();
  detail::check_species(spec, q, "eval_Wim");
  const std::size_t n = g.grid.size();
  std::vector<RealField> out(q, RealField(n, 0.0));
  if (const auto* s = std::get_if<DriftCubicSpec>(&spec)) {
    for (std::size_t k = 0; k < q; ++k) {
      if (s->drift[k] == 0.0) continue;
      detail::require_live(g, k, "eval_Wim");
      for (std::size_t i = 0; i < n; ++i) out[k][i] = -0.5 * s->drift[k] * g.drho[k][i] / g.rho[k][i];
    }
  } else if (const auto* s = std::get_if<DerivativeSpec>(&spec)) {
    for (std::size_t k = 0; k < q; ++k) {
      for (std::size_t i = 0; i < n; ++i) out[k][i] = 2.0 * s->delta(k, k) * g.drho[k][i];
      for (std::size_t j = 0; j < q; ++j) {
        if (j == k || s->delta(k, j) == 0.0) continue;
        detail::require_live(g, k, "eval_Wim");
        for (std::size_t i = 0; i < n; ++i)
          out[k][i] += s->delta(k, j) * (g.drho[j][i] + g.rho[j][i] / g.rho[k][i] * g.drho[k][i]);
      }
    }
  }
  return out;
}

/// Flux F_k with Wim_k = (1/rho_k) dF_k/dx.
inline std::vector<RealField> eval_F(const NonlinearitySpec& spec, const HydroGradients& g) {
  const std::size_t q = g.species();
  detail::check_species(spec, q, "eval_F");
  const std::size_t n = g.grid.size();
  std::vector<RealField> out(q, RealField(n, 0.0));
  if (const auto* s = std::get_if<DriftCubicSpec>(&spec)) {
    for (std::size_t k = 0; k < q; ++k)
      for (std::size_t i = 0; i < n; ++i) out[k][i] = -0.5 * s->drift[k] * g.rho[k][i];
  } else if (const auto* s = std::get_if<DerivativeSpec>(&spec)) {
    for (std::size_t k = 0; k < q; ++k)
      for (std::size_t j = 0; j < q; ++j) {
        if (s->delta(k, j) == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[k][i] += s->delta(k, j) * g.rho[k][i] * g.rho[j][i];
      }
  }
  return out;
}

inline std::vector<RealField> eval_W(const NonlinearitySpec& spec, const HydroFields& h) {
  return eval_W(spec, gradients(h));
}
inline std::vector<RealField> eval_Wim(const NonlinearitySpec& spec, const HydroFields& h) {
  return eval_Wim(spec, gradients(h));
}
inline std::vector<RealField> eval_F(const NonlinearitySpec& spec, const HydroFields& h) {
  return eval_F(spec, gradients(h));
}

}  // namespace colehopf
