#pragma once

#include <vector>

#include "rbf/dense_matrix.hpp"
#include "rbf/measurement.hpp"
#include "rbf/solver_config.hpp"

namespace rbf {

inline constexpr int kRmcDefaultMaxIter = 500;

/// Robust matrix completion by ADMM on the bilinear model
///
///   min ‖P_Ω(S)‖₁ + λ‖V‖_*   s.t.  D = U·Vᵀ + S,  UᵀU = I.
///
/// Each iteration takes U from a QR of P·V (P = D − S + Y/α), V from SVT of
/// Pᵀ·U, shrinks S on Ω and sets it to the residual off Ω, then updates the
/// multiplier and grows α geometrically. Stops once ‖D − UVᵀ − S‖_F drops
/// below tol·‖P_Ω(D)‖_F.
///
/// Entries of `d_obs` outside Ω are ignored. The returned S is zero off Ω.
SolveResult solve_rmc(const DenseMatrix& d_obs, const ObservationMask& mask, const SolverConfig& cfg,
                      const IterationObserver& observer = {});

/// RMC with every entry observed.
SolveResult solve_rpca(const DenseMatrix& d, const SolverConfig& cfg,
                       const IterationObserver& observer = {});

/// Trace-norm regularized matrix completion
///
///   min ½‖P_Ω(D) − P_Ω(L)‖²_F + λ‖V‖_*   s.t.  L = U·Vᵀ,  UᵀU = I
///
/// by the same ADMM pattern with the multiplier on L = UVᵀ. The observer's
/// `s` slot carries L. The result's `s` is zero.
SolveResult solve_mc(const DenseMatrix& d_obs, const ObservationMask& mask, const SolverConfig& cfg,
                     const IterationObserver& observer = {});

struct RankDecision {
  std::size_t rank;                  // new working rank, or the current one
  double gap;                        // gap statistic; 0 when undefined
  std::vector<double> eigenvalues;   // of VᵀV, nonincreasing, length d
  DenseMatrix eigenvectors;          // d×rank, leading eigenvectors of VᵀV
};

/// Eigen-gap test on VᵀV.
///
/// With λ₁ ≥ … ≥ λ_d and quotients q_i = λ_i/λ_{i+1}, picks r̂ = argmax q_i
/// and reduces to r̂ when (d−1)·q_r̂ / Σ_{i≠r̂} q_i ≥ 10. Zero eigenvalues in
/// the denominator are floored at 1e-300. For d = 2 the single quotient is
/// compared against the threshold directly.
RankDecision adjust_rank_once(const DenseMatrix& v, std::size_t current_d);

inline constexpr double kRankGapThreshold = 10.0;

}  // namespace rbf
