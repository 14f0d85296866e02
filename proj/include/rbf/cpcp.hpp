#pragma once

#include <span>

#include "rbf/dense_matrix.hpp"
#include "rbf/measurement.hpp"
#include "rbf/solver_config.hpp"

namespace rbf {

inline constexpr int kCpcpDefaultMaxIter = 1000;

/// (α/2)·‖y − P(x) + Y/α‖²₂, the smooth part of the augmented Lagrangian
/// seen by either block (x = T + S).
double measurement_penalty(const LinearMeasurement& op, const DenseMatrix& x,
                           std::span<const double> y, std::span<const double> multiplier,
                           double alpha);

/// Gradient of measurement_penalty in x: α·P⋆(P(x) − y − Y/α).
DenseMatrix measurement_gradient(const LinearMeasurement& op, const DenseMatrix& x,
                                 std::span<const double> y, std::span<const double> multiplier,
                                 double alpha);

/// Compressive principal component pursuit by linearized ADMM:
///
///   min λ‖V‖_* + ‖S‖₁   s.t.  y = P(S + U·Vᵀ),  UᵀU = I.
///
/// The smooth penalty is replaced by its linearization around the current
/// iterate plus a proximal term with constant α/τ, τ = 1/‖P⋆P‖₂ (estimated
/// once by power iteration). That gives a gradient step of length τ/α
/// followed by the bilinear U/V update for T = U·Vᵀ and soft-thresholding
/// for S. The multiplier lives in measurement space.
///
/// Stops when (‖ΔT‖²_F + ‖ΔS‖²_F)/(‖T‖²_F + ‖S‖²_F) < tol; the test is
/// skipped on the first iteration and while the denominator is below 1e-30.
SolveResult solve_cpcp(std::span<const double> y_meas, const LinearMeasurement& op,
                       const SolverConfig& cfg, const IterationObserver& observer = {});

}  // namespace rbf
