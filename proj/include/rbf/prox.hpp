#pragma once

#include "rbf/dense_matrix.hpp"

namespace rbf {

/// Singular value thresholding: U·diag(max(σ−μ, 0))·Vᵀ.
///
/// Proximal map of μ‖·‖_*. Singular values equal to μ map to zero. Throws
/// ArgumentError for μ < 0.
DenseMatrix svt(const DenseMatrix& m, double mu);

/// Elementwise shrinkage sign(a)·max(|a|−τ, 0). Throws ArgumentError for τ < 0.
DenseMatrix soft_threshold(const DenseMatrix& a, double tau);

inline double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

}  // namespace rbf
