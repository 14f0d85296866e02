#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rbf {

/// Row-major dense real matrix.
///
/// Holds the observation D, the factors U and V, the sparse part S and the
/// multiplier Y. Entries are finite whenever the matrix is built from
/// external data; arithmetic helpers below never introduce non-finite values
/// from finite inputs except through overflow.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of `entries` (row-major). Throws DimensionError if the
  /// length is not rows*cols and ArgumentError on NaN/Inf.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  /// Top d×d identity stacked on zeros, the `eye(m, d)` initial U.
  static DenseMatrix eye(std::size_t rows, std::size_t cols);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<double> data() noexcept { return entries_; }
  std::span<const double> data() const noexcept { return entries_; }
  std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }

  DenseMatrix transpose() const;
  /// First `count` columns.
  DenseMatrix leading_columns(std::size_t count) const;
  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double scale) noexcept;

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator-(DenseMatrix a) { return a *= -1.0; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// a·b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ·b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a·bᵀ
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& a);
/// Frobenius inner product Σ aᵢⱼ bᵢⱼ.
double inner(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);
/// Entrywise ℓ1 norm.
double l1_norm(const DenseMatrix& a);

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what);

}  // namespace rbf
