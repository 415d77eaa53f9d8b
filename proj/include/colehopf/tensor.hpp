#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace colehopf {

/// Dense row-major q x q coefficient table.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t k, std::size_t j) { return data_[k * n_ + j]; }
  double operator()(std::size_t k, std::size_t j) const { return data_[k * n_ + j]; }

  const std::vector<double>& values() const noexcept { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Dense q x q x q coefficient table, indexed (k, j, i).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t n, double fill = 0.0) : n_(n), data_(n * n * n, fill) {}

  std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t k, std::size_t j, std::size_t i) {
    return data_[(k * n_ + j) * n_ + i];
  }
  double operator()(std::size_t k, std::size_t j, std::size_t i) const {
    return data_[(k * n_ + j) * n_ + i];
  }

  const std::vector<double>& values() const noexcept { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace colehopf
