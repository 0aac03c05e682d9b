// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lapa {

// Dense column-major matrix. Column-major so per-user channel vectors
// (matrix columns) are contiguous.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<T> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
  }

  Matrix& operator-=(const Matrix& other) {
    require_same_shape(other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
  }

  Matrix& operator*=(const T& scale) {
    for (auto& v : data_) v *= scale;
    return *this;
  }

  friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
  friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }

 private:
  void require_same_shape(const Matrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMat = Matrix<std::complex<double>>;
using RMat = Matrix<double>;

// Hermitian inner product sum(conj(a[k]) * b[k]); plain dot for real spans.
inline std::complex<double> cdot(std::span<const std::complex<double>> a,
                                 std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cdot length mismatch");
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

inline double norm_sq(std::span<const std::complex<double>> a) noexcept {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return acc;
}

template <typename T>
double frobenius_sq(const Matrix<T>& m) noexcept {
  double acc = 0.0;
  for (const auto& v : m.flat()) acc += std::norm(std::complex<double>(v));
  return acc;
}

// Naive product with a fixed accumulation order; the inner index runs
// ascending so results are deterministic.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape mismatch");
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T bkj = b(k, j);
      for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bkj;
    }
  }
  return out;
}

// A^H A for complex matrices (Gram matrix), column-pair Hermitian dots.
inline CMat gram(const CMat& a) {
  CMat out(a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) out(i, j) = cdot(a.col(i), a.col(j));
  return out;
}

}  // namespace lapa
