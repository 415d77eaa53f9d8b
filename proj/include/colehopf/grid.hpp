#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "colehopf/error.hpp"

namespace colehopf {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;

/// Uniform periodic grid on [x_min, x_max); x_max is identified with x_min.
class Grid1D {
 public:
  static Grid1D make(std::size_t n_points, double x_min, double x_max) {
    if (!(x_max > x_min))
      throw Error(ErrorKind::DomainOrder, "grid: x_max must exceed x_min");
    if (n_points < 8 || (n_points & (n_points - 1)) != 0)
      throw Error(ErrorKind::NotPowerOfTwo,
                  "grid: n_points must be a power of two >= 8, got " +
                      std::to_string(n_points));
    return Grid1D(n_points, x_min, x_max);
  }

  std::size_t size() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double dx() const noexcept { return dx_; }
  double node(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }

  RealField nodes() const {
    RealField x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
    return x;
  }

  /// Angular wavenumber of FFT bin m (Nyquist bin reported as +n/2).
  double wavenumber(std::size_t m) const noexcept {
    const double base = 2.0 * std::numbers::pi / length();
    const auto half = n_ / 2;
    const double index = m <= half ? static_cast<double>(m)
                                   : static_cast<double>(m) - static_cast<double>(n_);
    return base * index;
  }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  Grid1D(std::size_t n, double x_min, double x_max)
      : n_(n), x_min_(x_min), x_max_(x_max), dx_((x_max - x_min) / static_cast<double>(n)) {}

  std::size_t n_;
  double x_min_;
  double x_max_;
  double dx_;
};

inline Grid1D make_grid(std::size_t n_points, double x_min, double x_max) {
  return Grid1D::make(n_points, x_min, x_max);
}

namespace detail {

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // Unnormalized transforms; the caller divides by n after a round trip.
  void forward(const Complex* in, Complex* out) const { run(forward_, in, out); }
  void backward(const Complex* in, Complex* out) const { run(backward_, in, out); }

  std::size_t size() const noexcept { return n_; }

 private:
  static void run(fftw_plan plan, const Complex* in, Complex* out) {
    // Out-of-place c2c execution leaves the input untouched.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

  std::size_t n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// FFTW planning is not thread-safe; execution with new-array calls is.
inline const FftPlan& fft_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> plans;
  std::lock_guard lock(mutex);
  auto& slot = plans[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

inline void check_length(std::size_t got, const Grid1D& g, const char* who) {
  if (got != g.size())
    throw Error(ErrorKind::LengthMismatch, std::string(who) + ": field length " +
                                               std::to_string(got) + " != grid size " +
                                               std::to_string(g.size()));
}

template <typename T>
ComplexField to_complex(std::span<const T> f) {
  return ComplexField(f.begin(), f.end());
}

template <typename T>
std::vector<T> from_complex(const ComplexField& f) {
  if constexpr (std::is_same_v<T, Complex>) {
    return f;
  } else {
    std::vector<T> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
    return out;
  }
}

inline ComplexField spectrum(const ComplexField& f) {
  ComplexField out(f.size());
  fft_plan(f.size()).forward(f.data(), out.data());
  return out;
}

inline ComplexField synthesize(const ComplexField& coeffs) {
  ComplexField out(coeffs.size());
  fft_plan(coeffs.size()).backward(coeffs.data(), out.data());
  const double scale = 1.0 / static_cast<double>(coeffs.size());
  for (auto& v : out) v *= scale;
  return out;
}

// Multiplier of the first derivative; the Nyquist bin is dropped so that the
// operator stays real and skew-symmetric.
inline Complex first_derivative_symbol(const Grid1D& g, std::size_t m) {
  if (m == g.size() / 2) return {0.0, 0.0};
  return {0.0, g.wavenumber(m)};
}

inline double second_derivative_symbol(const Grid1D& g, std::size_t m) {
  const double k = g.wavenumber(m);
  return -k * k;
}

}  // namespace detail

/// Spectral first derivative of a periodic field; exact for band-limited input.
template <typename T>
std::vector<T> derivative(std::span<const T> f, const Grid1D& g) {
  detail::check_length(f.size(), g, "derivative");
  auto coeffs = detail::spectrum(detail::to_complex(f));
  for (std::size_t m = 0; m < coeffs.size(); ++m) coeffs[m] *= detail::first_derivative_symbol(g, m);
  return detail::from_complex<T>(detail::synthesize(coeffs));
}

template <typename T>
std::vector<T> derivative(const std::vector<T>& f, const Grid1D& g) {
  return derivative(std::span<const T>(f), g);
}

template <typename T>
std::vector<T> second_derivative(std::span<const T> f, const Grid1D& g) {
  detail::check_length(f.size(), g, "second_derivative");
  auto coeffs = detail::spectrum(detail::to_complex(f));
  for (std::size_t m = 0; m < coeffs.size(); ++m) coeffs[m] *= detail::second_derivative_symbol(g, m);
  return detail::from_complex<T>(detail::synthesize(coeffs));
}

template <typename T>
std::vector<T> second_derivative(const std::vector<T>& f, const Grid1D& g) {
  return second_derivative(std::span<const T>(f), g);
}

struct DerivativePair {
  ComplexField first;
  ComplexField second;
};

/// First and second derivatives from one forward transform.
inline DerivativePair derivatives(std::span<const Complex> f, const Grid1D& g) {
  detail::check_length(f.size(), g, "derivatives");
  const auto coeffs = detail::spectrum(ComplexField(f.begin(), f.end()));
  ComplexField d1(coeffs.size());
  ComplexField d2(coeffs.size());
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    d1[m] = coeffs[m] * detail::first_derivative_symbol(g, m);
    d2[m] = coeffs[m] * detail::second_derivative_symbol(g, m);
  }
  return {detail::synthesize(d1), detail::synthesize(d2)};
}

inline double mean(std::span<const double> f) {
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum / static_cast<double>(f.size());
}

/// Periodic quadrature sum_i f_i dx.
inline double integrate(std::span<const double> f, const Grid1D& g) {
  detail::check_length(f.size(), g, "integrate");
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * g.dx();
}

inline double integrate(const RealField& f, const Grid1D& g) {
  return integrate(std::span<const double>(f), g);
}

/// Antiderivative split into a periodic part and a secular slope:
/// P(x) = periodic(x) + slope * (x - x_anchor), with periodic(anchor) = 0.
struct AntiderivativeParts {
  RealField periodic;
  double slope = 0.0;
};

inline AntiderivativeParts antiderivative_parts(std::span<const double> f, const Grid1D& g,
                                                std::size_t anchor) {
  detail::check_length(f.size(), g, "antiderivative");
  if (anchor >= g.size())
    throw Error(ErrorKind::AnchorOutOfRange, "antiderivative: anchor " + std::to_string(anchor) +
                                                 " outside grid of " + std::to_string(g.size()));
  auto coeffs = detail::spectrum(detail::to_complex(f));
  const double slope = coeffs[0].real() / static_cast<double>(g.size());
  coeffs[0] = 0.0;
  coeffs[g.size() / 2] = 0.0;
  for (std::size_t m = 1; m < coeffs.size(); ++m) {
    if (m == g.size() / 2) continue;
    coeffs[m] /= Complex(0.0, g.wavenumber(m));
  }
  auto periodic = detail::from_complex<double>(detail::synthesize(coeffs));
  const double offset = periodic[anchor];
  for (auto& v : periodic) v -= offset;
  return {std::move(periodic), slope};
}

inline RealField antiderivative(std::span<const double> f, const Grid1D& g, std::size_t anchor) {
  auto parts = antiderivative_parts(f, g, anchor);
  const double x0 = g.node(anchor);
  for (std::size_t i = 0; i < g.size(); ++i) parts.periodic[i] += parts.slope * (g.node(i) - x0);
  return std::move(parts.periodic);
}

inline RealField antiderivative(const RealField& f, const Grid1D& g, std::size_t anchor) {
  return antiderivative(std::span<const double>(f), g, anchor);
}

/// Rectangular 2-D sampling descriptor; fields are stored row-major with x
/// varying fastest: value(ix, iy) = data[iy * x.size() + ix].
struct Grid2D {
  Grid1D x;
  Grid1D y;

  std::size_t size() const noexcept { return x.size() * y.size(); }
};

namespace detail {

// Fornberg weights for the first derivative at z from nodes offsets[].
inline std::vector<double> fornberg_first_derivative(double z, std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace detail

/// Non-periodic 9-point finite-difference derivative (one-sided windows near
/// the ends); exact for polynomials of degree <= 8.
inline RealField stencil_derivative(std::span<const double> f, double spacing) {
  constexpr std::size_t width = 9;
  const std::size_t n = f.size();
  if (n < width)
    throw Error(ErrorKind::LengthMismatch, "stencil_derivative: need at least 9 samples");
  RealField out(n, 0.0);
  std::vector<double> offsets(width);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = i < width / 2 ? 0 : std::min(i - width / 2, n - width);
    for (std::size_t s = 0; s < width; ++s)
      offsets[s] = static_cast<double>(start + s) - static_cast<double>(i);
    const auto w = detail::fornberg_first_derivative(0.0, offsets);
    double acc = 0.0;
    for (std::size_t s = 0; s < width; ++s) acc += w[s] * f[start + s];
    out[i] = acc / spacing;
  }
  return out;
}

}  // namespace colehopf
