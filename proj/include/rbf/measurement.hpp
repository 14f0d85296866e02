#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rbf/dense_matrix.hpp"

namespace rbf {

/// Index set Ω of observed entries of a rows×cols matrix.
///
/// Stored both as a sorted list of flat (row-major) indices and as a
/// same-shape marker for O(1) membership.
class ObservationMask {
 public:
  using Entry = std::pair<std::size_t, std::size_t>;

  ObservationMask() = default;
  /// Throws ArgumentError on out-of-range or duplicate entries.
  ObservationMask(std::size_t rows, std::size_t cols, std::span<const Entry> observed);

  static ObservationMask full(std::size_t rows, std::size_t cols);
  /// `marker` is row-major, nonzero meaning observed.
  static ObservationMask from_marker(std::size_t rows, std::size_t cols,
                                     std::span<const std::uint8_t> marker);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t count() const noexcept { return flat_.size(); }
  bool is_full() const noexcept { return flat_.size() == rows_ * cols_; }

  bool contains(std::size_t i, std::size_t j) const { return marker_[i * cols_ + j] != 0; }
  bool contains_flat(std::size_t k) const { return marker_[k] != 0; }
  /// Sorted row-major flat indices of Ω.
  std::span<const std::size_t> flat_indices() const noexcept { return flat_; }
  std::vector<Entry> entries() const;

  ObservationMask complement() const;

  friend bool operator==(const ObservationMask&, const ObservationMask&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> flat_;
  std::vector<std::uint8_t> marker_;
};

/// P_Ω(a): keeps entries on Ω and zeroes the rest.
DenseMatrix mask_project(const DenseMatrix& a, const ObservationMask& mask);
/// P_{Ω^C}(a).
DenseMatrix mask_project_complement(const DenseMatrix& a, const ObservationMask& mask);

/// A linear map from rows×cols matrices to a coefficient vector of length p,
/// together with its adjoint.
class LinearMeasurement {
 public:
  virtual ~LinearMeasurement() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual std::size_t measurement_count() const = 0;

  virtual std::vector<double> forward(const DenseMatrix& a) const = 0;
  virtual DenseMatrix adjoint(std::span<const double> y) const = 0;

  /// adjoint(forward(a)), the projected-matrix form of the operator.
  DenseMatrix project(const DenseMatrix& a) const { return adjoint(forward(a)); }

 protected:
  void check_matrix(const DenseMatrix& a) const;
  void check_vector(std::span<const double> y) const;
};

/// P_Ω viewed as a coefficient map: forward lists the observed entries in
/// flat-index order.
class MaskMeasurement final : public LinearMeasurement {
 public:
  explicit MaskMeasurement(ObservationMask mask) : mask_(std::move(mask)) {}

  std::size_t rows() const override { return mask_.rows(); }
  std::size_t cols() const override { return mask_.cols(); }
  std::size_t measurement_count() const override { return mask_.count(); }
  std::vector<double> forward(const DenseMatrix& a) const override;
  DenseMatrix adjoint(std::span<const double> y) const override;

  const ObservationMask& mask() const noexcept { return mask_; }

 private:
  ObservationMask mask_;
};

/// Projection onto a p-dimensional subspace Q of matrix space, given by an
/// orthonormal basis B_1..B_p stored as the rows of a p×(rows·cols) matrix.
class SubspaceOperator final : public LinearMeasurement {
 public:
  /// Throws DimensionError if basis.cols() != rows·cols or p > rows·cols.
  SubspaceOperator(std::size_t rows, std::size_t cols, DenseMatrix basis, std::uint64_t seed = 0);

  /// Basis made of the indicator matrices of Ω, in flat-index order.
  static SubspaceOperator from_mask(const ObservationMask& mask);

  std::size_t rows() const override { return rows_; }
  std::size_t cols() const override { return cols_; }
  std::size_t measurement_count() const override { return basis_.rows(); }
  std::vector<double> forward(const DenseMatrix& a) const override;
  DenseMatrix adjoint(std::span<const double> y) const override;

  const DenseMatrix& basis() const noexcept { return basis_; }
  /// Basis element B_i reshaped to rows×cols.
  DenseMatrix basis_element(std::size_t i) const;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  DenseMatrix basis_;
  std::uint64_t seed_;
};

/// yᵢ = ⟨Bᵢ, a⟩.
std::vector<double> subspace_forward(const DenseMatrix& a, const SubspaceOperator& q);
/// Σᵢ yᵢ·Bᵢ.
DenseMatrix subspace_adjoint(std::span<const double> y, const SubspaceOperator& q);

/// p orthonormal basis matrices from Householder QR of i.i.d. standard
/// normal draws. Deterministic in `seed`. Throws ArgumentError unless
/// 1 ≤ p ≤ rows·cols.
SubspaceOperator draw_random_subspace(std::size_t rows, std::size_t cols, std::size_t p,
                                      std::uint64_t seed);

}  // namespace rbf
