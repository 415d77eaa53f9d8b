#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "colehopf/fields.hpp"
#include "colehopf/nonlinearity.hpp"

namespace colehopf {

enum class SpecialCase { Jackiw, ChenLeeLiu, KaupNewell, Generic };

inline const char* to_string(SpecialCase c) {
  switch (c) {
    case SpecialCase::Jackiw: return "Jackiw";
    case SpecialCase::ChenLeeLiu: return "ChenLeeLiu";
    case SpecialCase::KaupNewell: return "KaupNewell";
    case SpecialCase::Generic: return "Generic";
  }
  return "?";
}

/// Ordered set of labels; Generic only ever appears alone.
using SpecialCaseLabels = std::vector<SpecialCase>;

inline constexpr double kDefaultClassifyTolerance = 1e-12;

/// Named single-species members of the derivative family.
inline SpecialCaseLabels classify_q1(double beta, double gamma, double delta, double lambda,
                                     double tol = kDefaultClassifyTolerance) {
  const double scale = std::max({std::abs(beta), std::abs(gamma), std::abs(delta), 1.0});
  const bool no_quartic = std::abs(lambda) <= tol;
  SpecialCaseLabels labels;
  if (std::abs(delta) <= tol && no_quartic) labels.push_back(SpecialCase::Jackiw);
  if (std::abs(4.0 * delta + beta + gamma) <= tol * scale && no_quartic)
    labels.push_back(SpecialCase::ChenLeeLiu);
  if (std::abs(4.0 * delta + 3.0 * (beta + gamma)) <= tol * scale && no_quartic)
    labels.push_back(SpecialCase::KaupNewell);
  if (labels.empty()) labels.push_back(SpecialCase::Generic);
  return labels;
}

namespace detail {

inline void check_delta(const Matrix& delta, const DispersionMatrix& A, const char* who) {
  if (delta.size() != A.size())
    throw Error(ErrorKind::ShapeMismatch, std::string(who) + ": delta is " + std::to_string(delta.size()) +
                                              "x" + std::to_string(delta.size()) + " but A has " +
                                              std::to_string(A.size()) + " entries");
}

// beta_kj = -2 delta_kj and gamma_kj = 2 A_j delta_kj / A_k.
inline DerivativeSpec drift_cancelling(const Matrix& delta, const DispersionMatrix& A) {
  const std::size_t q = delta.size();
  auto spec = DerivativeSpec::zeros(q);
  spec.delta = delta;
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t j = 0; j < q; ++j) {
      spec.beta(k, j) = -2.0 * delta(k, j);
      spec.gamma(k, j) = 2.0 * A[j] * delta(k, j) / A[k];
    }
  return spec;
}

}  // namespace detail

/// Coefficients whose transformed system is a set of decoupled linear equations.
inline DerivativeSpec case1_coeffs(const Matrix& delta, const DispersionMatrix& A) {
  detail::check_delta(delta, A, "case1_coeffs");
  auto spec = detail::drift_cancelling(delta, A);
  const std::size_t q = delta.size();
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t i = 0; i < q; ++i)
        spec.lambda(k, j, i) = delta(k, j) * (2.0 * delta(j, i) - delta(k, i)) / A[k];
  return spec;
}

struct Case2Coefficients {
  DerivativeSpec spec;
  std::vector<double> eta;
};

/// Coefficients whose transformed system is i phi_t + A phi'' + eta_k J_k phi = 0
/// per species, with free diagonal beta_kk.
inline Case2Coefficients case2_coeffs(const Matrix& delta, const std::vector<double>& beta_diag,
                                      const DispersionMatrix& A) {
  detail::check_delta(delta, A, "case2_coeffs");
  const std::size_t q = delta.size();
  if (beta_diag.size() != q)
    throw Error(ErrorKind::ShapeMismatch, "case2_coeffs: beta_diag length differs from q");
  auto spec = detail::drift_cancelling(delta, A);
  std::vector<double> eta(q);
  for (std::size_t k = 0; k < q; ++k) {
    const double bkk = beta_diag[k];
    const double dkk = delta(k, k);
    spec.beta(k, k) = bkk;
    eta[k] = (bkk + 2.0 * dkk) / (2.0 * A[k]);
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t i = 0; i < q; ++i) {
        double value;
        if (j == k && i == k)
          value = dkk * (bkk + 3.0 * dkk);
        else if (i == k)
          value = delta(k, j) * (bkk + dkk + 2.0 * delta(j, k));
        else if (j == k)
          value = dkk * delta(k, i);
        else
          value = delta(k, j) * (2.0 * delta(j, i) - delta(k, i));
        spec.lambda(k, j, i) = value / A[k];
      }
    }
  }
  return {std::move(spec), std::move(eta)};
}

struct Case3Coefficients {
  DerivativeSpec spec;
  Matrix eta;
};

/// Coefficients whose transformed system is i phi_k,t + A_k phi_k'' + sum_j eta_kj J_j phi_k = 0.
inline Case3Coefficients case3_coeffs(const Matrix& delta, const Matrix& gamma, const DispersionMatrix& A) {
  detail::check_delta(delta, A, "case3_coeffs");
  const std::size_t q = delta.size();
  if (gamma.size() != q) throw Error(ErrorKind::ShapeMismatch, "case3_coeffs: gamma shape differs from delta");
  auto spec = DerivativeSpec::zeros(q);
  spec.delta = delta;
  spec.gamma = gamma;
  Matrix eta(q);
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t j = 0; j < q; ++j) {
      spec.beta(k, j) = -2.0 * delta(k, j);
      eta(k, j) = (gamma(k, j) - 2.0 * A[j] * delta(k, j) / A[k]) / (2.0 * A[j]);
      for (std::size_t i = 0; i < q; ++i)
        spec.lambda(k, j, i) = gamma(k, j) * delta(j, i) / A[j] - delta(k, j) * delta(k, i) / A[k];
    }
  }
  return {std::move(spec), std::move(eta)};
}

}  // namespace colehopf
