#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbf/dense_matrix.hpp"

namespace rbf {

struct SolverConfig {
  std::optional<double> lambda;  // unset: √max(m, n)
  std::size_t rank = 10;         // initial working rank d
  double rho = 1.1;
  std::optional<double> alpha0;  // unset: 1/‖observed data‖
  double alpha_max = 1e10;
  double tol = 1e-4;
  std::optional<int> max_iter;  // unset: solver default
  bool adjust_rank = false;
  std::uint64_t seed = 0;

  /// Throws ArgumentError on hard violations (d < 1, tol ≤ 0, alpha_max <
  /// alpha0, ...). Returns human-readable warnings for soft ones, currently
  /// only ρ outside (1.0, 1.1].
  std::vector<std::string> validate() const;

  double lambda_for(std::size_t rows, std::size_t cols) const;
};

enum class Termination { converged, max_iter_reached };

const char* to_string(Termination t) noexcept;

struct TraceRecord {
  int iter = 0;
  double residual = 0.0;   // feasibility gap of the splitting constraint
  double objective = 0.0;
  double alpha = 0.0;      // penalty used during this iteration
  std::size_t rank = 0;    // working d at the end of this iteration
  double ratio = 0.0;      // relative-change stopping statistic (CPCP only)
};

struct SolveResult {
  DenseMatrix u;  // m×d_final, orthonormal columns
  DenseMatrix v;  // n×d_final
  DenseMatrix s;  // m×n, zero off Ω (zero everywhere for matrix completion)
  DenseMatrix y;  // matrix-space multiplier (RMC / MC)
  std::vector<double> y_measurements;  // measurement-space multiplier (CPCP)
  std::vector<TraceRecord> trace;
  Termination termination = Termination::max_iter_reached;
  std::optional<int> rank_adjusted_at;  // iteration at which d was reduced
  double tau = 0.0;  // CPCP linearization constant 1/‖P⋆P‖₂

  int iterations() const noexcept { return static_cast<int>(trace.size()); }
  DenseMatrix low_rank() const { return matmul_nt(u, v); }
};

/// Snapshot handed to an observer after every completed iteration.
struct IterateView {
  int iter;
  const DenseMatrix& u;
  const DenseMatrix& v;
  const DenseMatrix& s;  // S for RMC/CPCP, the auxiliary L for matrix completion
  const DenseMatrix& y;  // empty for CPCP
  double alpha;
};

using IterationObserver = std::function<void(const IterateView&)>;

}  // namespace rbf
