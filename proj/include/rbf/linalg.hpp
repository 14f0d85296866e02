#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rbf/dense_matrix.hpp"

namespace rbf {

struct QrFactors {
  DenseMatrix q;  // m×d, orthonormal columns
  DenseMatrix r;  // d×d, upper triangular with nonnegative diagonal
};

struct ThinSvd {
  DenseMatrix u;              // n×r
  std::vector<double> sigma;  // nonincreasing, r entries above the rank cutoff
  DenseMatrix v;              // d×r

  std::size_t rank() const noexcept { return sigma.size(); }
};

/// Singular values at or below this fraction of σ_max are treated as zero.
inline constexpr double kRankCutoff = 1e-12;

/// Thin Householder QR of a tall matrix (rows ≥ cols).
///
/// R carries a nonnegative diagonal, so Q is unique for full column rank
/// input. Columns that are already in the span of their predecessors get an
/// identity reflector; the matching Q column is then the Householder image of
/// the canonical basis vector, which keeps Q orthonormal for any input.
QrFactors qr_thin(const DenseMatrix& a);

/// Thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Only the singular triplets with σ > kRankCutoff·σ_max are returned, so
/// u·diag(sigma)·vᵀ reconstructs `a` and rank() is the numerical rank. A zero
/// matrix yields an empty factorization.
ThinSvd svd_thin(const DenseMatrix& a);

/// Sum of singular values.
double nuclear_norm(const DenseMatrix& a);

/// A self-adjoint positive semidefinite map on rows×cols matrices.
struct MatrixOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<DenseMatrix(const DenseMatrix&)> apply;
};

struct PowerIterationOptions {
  std::uint64_t seed = 0x5eed;
  int max_iter = 1000;
  double rel_tol = 1e-12;
};

/// Largest eigenvalue of a PSD operator by power iteration from a seeded
/// Gaussian start. Throws ConvergenceError (carrying the last Rayleigh
/// quotient) when the cap is reached first.
double spectral_norm(const MatrixOperator& gram, const PowerIterationOptions& options = {});

}  // namespace rbf
