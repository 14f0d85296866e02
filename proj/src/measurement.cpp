#include "rbf/measurement.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"

namespace rbf {

ObservationMask::ObservationMask(std::size_t rows, std::size_t cols, std::span<const Entry> observed)
    : rows_(rows), cols_(cols), marker_(rows * cols, 0) {
  flat_.reserve(observed.size());
  for (const auto& [i, j] : observed) {
    if (i >= rows || j >= cols) {
      throw ArgumentError("ObservationMask: entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") out of range");
    }
    auto& mark = marker_[i * cols + j];
    if (mark != 0) {
      throw ArgumentError("ObservationMask: duplicate entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
    }
    mark = 1;
    flat_.push_back(i * cols + j);
  }
  std::sort(flat_.begin(), flat_.end());
}

ObservationMask ObservationMask::full(std::size_t rows, std::size_t cols) {
  std::vector<std::uint8_t> marker(rows * cols, 1);
  return from_marker(rows, cols, marker);
}

ObservationMask ObservationMask::from_marker(std::size_t rows, std::size_t cols,
                                             std::span<const std::uint8_t> marker) {
  if (marker.size() != rows * cols) throw DimensionError("ObservationMask: marker size mismatch");
  ObservationMask mask;
  mask.rows_ = rows;
  mask.cols_ = cols;
  mask.marker_.assign(marker.begin(), marker.end());
  for (std::size_t k = 0; k < marker.size(); ++k) {
    if (marker[k] != 0) {
      mask.marker_[k] = 1;
      mask.flat_.push_back(k);
    }
  }
  return mask;
}

std::vector<ObservationMask::Entry> ObservationMask::entries() const {
  std::vector<Entry> out;
  out.reserve(flat_.size());
  for (std::size_t k : flat_) out.emplace_back(k / cols_, k % cols_);
  return out;
}

ObservationMask ObservationMask::complement() const {
  std::vector<std::uint8_t> flipped(marker_.size());
  for (std::size_t k = 0; k < marker_.size(); ++k) flipped[k] = marker_[k] == 0 ? 1 : 0;
  return from_marker(rows_, cols_, flipped);
}

namespace {

void check_mask_shape(const DenseMatrix& a, const ObservationMask& mask) {
  if (a.rows() != mask.rows() || a.cols() != mask.cols())
    throw DimensionError("mask shape does not match matrix shape");
}

}  // namespace

DenseMatrix mask_project(const DenseMatrix& a, const ObservationMask& mask) {
  check_mask_shape(a, mask);
  DenseMatrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t k : mask.flat_indices()) dst[k] = src[k];
  return out;
}

DenseMatrix mask_project_complement(const DenseMatrix& a, const ObservationMask& mask) {
  check_mask_shape(a, mask);
  DenseMatrix out = a;
  auto dst = out.data();
  for (std::size_t k : mask.flat_indices()) dst[k] = 0.0;
  return out;
}

void LinearMeasurement::check_matrix(const DenseMatrix& a) const {
  if (a.rows() != rows() || a.cols() != cols())
    throw DimensionError("measurement operator: matrix shape mismatch");
}

void LinearMeasurement::check_vector(std::span<const double> y) const {
  if (y.size() != measurement_count())
    throw DimensionError("measurement operator: expected " + std::to_string(measurement_count()) +
                         " coefficients, got " + std::to_string(y.size()));
}

std::vector<double> MaskMeasurement::forward(const DenseMatrix& a) const {
  check_matrix(a);
  std::vector<double> y;
  y.reserve(mask_.count());
  auto src = a.data();
  for (std::size_t k : mask_.flat_indices()) y.push_back(src[k]);
  return y;
}

DenseMatrix MaskMeasurement::adjoint(std::span<const double> y) const {
  check_vector(y);
  DenseMatrix out(rows(), cols());
  auto dst = out.data();
  auto idx = mask_.flat_indices();
  for (std::size_t t = 0; t < idx.size(); ++t) dst[idx[t]] = y[t];
  return out;
}

SubspaceOperator::SubspaceOperator(std::size_t rows, std::size_t cols, DenseMatrix basis,
                                   std::uint64_t seed)
    : rows_(rows), cols_(cols), basis_(std::move(basis)), seed_(seed) {
  if (basis_.cols() != rows * cols) throw DimensionError("SubspaceOperator: basis width != rows*cols");
  if (basis_.rows() > rows * cols) throw DimensionError("SubspaceOperator: more basis elements than rows*cols");
}

SubspaceOperator SubspaceOperator::from_mask(const ObservationMask& mask) {
  const std::size_t mn = mask.rows() * mask.cols();
  DenseMatrix basis(mask.count(), mn);
  auto idx = mask.flat_indices();
  for (std::size_t t = 0; t < idx.size(); ++t) basis(t, idx[t]) = 1.0;
  return SubspaceOperator(mask.rows(), mask.cols(), std::move(basis));
}

std::vector<double> SubspaceOperator::forward(const DenseMatrix& a) const {
  check_matrix(a);
  auto x = a.data();
  std::vector<double> y(basis_.rows());
  for (std::size_t i = 0; i < basis_.rows(); ++i) {
    auto b = basis_.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += b[k] * x[k];
    y[i] = s;
  }
  return y;
}

DenseMatrix SubspaceOperator::adjoint(std::span<const double> y) const {
  check_vector(y);
  DenseMatrix out(rows_, cols_);
  auto dst = out.data();
  for (std::size_t i = 0; i < basis_.rows(); ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    auto b = basis_.row(i);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += yi * b[k];
  }
  return out;
}

DenseMatrix SubspaceOperator::basis_element(std::size_t i) const {
  auto b = basis_.row(i);
  return DenseMatrix(rows_, cols_, std::vector<double>(b.begin(), b.end()));
}

std::vector<double> subspace_forward(const DenseMatrix& a, const SubspaceOperator& q) {
  return q.forward(a);
}

DenseMatrix subspace_adjoint(std::span<const double> y, const SubspaceOperator& q) {
  return q.adjoint(y);
}

SubspaceOperator draw_random_subspace(std::size_t rows, std::size_t cols, std::size_t p,
                                      std::uint64_t seed) {
  const std::size_t mn = rows * cols;
  if (p < 1 || p > mn) {
    throw ArgumentError("draw_random_subspace: dimension " + std::to_string(p) +
                        " outside [1, " + std::to_string(mn) + "]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DenseMatrix draws(mn, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < mn; ++k) draws(k, i) = normal(rng);
  return SubspaceOperator(rows, cols, qr_thin(draws).q.transpose(), seed);
}

}  // namespace rbf
