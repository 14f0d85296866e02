#include "rbf/rmc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"
#include "rbf/prox.hpp"

namespace rbf {
namespace {

struct Factors {
  DenseMatrix u;
  DenseMatrix v;
};

// One U/V sweep against the target P: U spans P·V, V = SVT_μ(Pᵀ·U).
Factors bilinear_update(const DenseMatrix& p, const DenseMatrix& v, double mu) {
  DenseMatrix u = qr_thin(matmul(p, v)).q;
  DenseMatrix ptu = matmul_tn(p, u);
  // SVT only ever sees the thin n×d side.
  assert(std::min(ptu.rows(), ptu.cols()) <= v.cols());
  return {std::move(u), svt(ptu, mu)};
}

void check_problem(const DenseMatrix& d_obs, const ObservationMask& mask, const SolverConfig& cfg) {
  if (d_obs.rows() != mask.rows() || d_obs.cols() != mask.cols())
    throw DimensionError("observation matrix and mask shapes differ");
  if (mask.count() == 0) throw ArgumentError("empty observation mask");
  if (!d_obs.all_finite()) throw ArgumentError("observation matrix has non-finite entries");
  if (cfg.rank > std::min(d_obs.rows(), d_obs.cols()))
    throw ArgumentError("rank exceeds min(rows, cols)");
}

// Rotates U and V onto the leading eigendirections of VᵀV.
void truncate_factors(const RankDecision& decision, DenseMatrix& u, DenseMatrix& v) {
  u = matmul(u, decision.eigenvectors);
  v = matmul(v, decision.eigenvectors);
}

constexpr int kFirstRankCheck = 3;
// The eigen-gap test only runs once U·Vᵀ has settled; while SVT is still
// admitting new directions the zero tail of VᵀV gives a spurious gap.
constexpr double kRankSettleTol = 3e-3;

// ‖t − prev‖_F / ‖t‖_F, +∞ while t is zero.
double relative_change(const DenseMatrix& t, const DenseMatrix& prev) {
  const double norm = frobenius_norm(t);
  if (norm == 0.0) return std::numeric_limits<double>::infinity();
  return frobenius_norm(t - prev) / norm;
}

}  // namespace

RankDecision adjust_rank_once(const DenseMatrix& v, std::size_t current_d) {
  const std::size_t d = v.cols();
  if (d != current_d) throw DimensionError("adjust_rank_once: V width differs from current d");

  const ThinSvd f = svd_thin(v);
  RankDecision out{current_d, 0.0, std::vector<double>(d, 0.0), DenseMatrix()};
  for (std::size_t k = 0; k < f.rank(); ++k) out.eigenvalues[k] = f.sigma[k] * f.sigma[k];
  if (d < 2 || f.rank() == 0) return out;

  std::vector<double> quotients(d - 1);
  for (std::size_t i = 0; i + 1 < d; ++i)
    quotients[i] = out.eigenvalues[i] / std::max(out.eigenvalues[i + 1], 1e-300);
  const auto best = static_cast<std::size_t>(
      std::distance(quotients.begin(), std::max_element(quotients.begin(), quotients.end())));

  if (d == 2) {
    out.gap = quotients[0];
  } else {
    double rest = 0.0;
    for (std::size_t i = 0; i < quotients.size(); ++i)
      if (i != best) rest += quotients[i];
    out.gap = std::isinf(quotients[best]) || rest == 0.0
                  ? std::numeric_limits<double>::infinity()
                  : static_cast<double>(d - 1) * quotients[best] / rest;
  }

  if (out.gap >= kRankGapThreshold) {
    out.rank = best + 1;
    out.eigenvectors = f.v.leading_columns(out.rank);
  }
  return out;
}

SolveResult solve_rmc(const DenseMatrix& d_obs, const ObservationMask& mask, const SolverConfig& cfg,
                      const IterationObserver& observer) {
  cfg.validate();
  check_problem(d_obs, mask, cfg);

  const std::size_t m = d_obs.rows();
  const std::size_t n = d_obs.cols();
  const DenseMatrix d = mask_project(d_obs, mask);
  const double data_norm = frobenius_norm(d);
  const double lambda = cfg.lambda_for(m, n);
  const int max_iter = cfg.max_iter.value_or(kRmcDefaultMaxIter);

  SolveResult out;
  out.u = DenseMatrix::eye(m, cfg.rank);
  out.v = DenseMatrix(n, cfg.rank);
  out.s = DenseMatrix(m, n);
  out.y = DenseMatrix(m, n);
  if (data_norm == 0.0) {
    out.termination = Termination::converged;
    return out;
  }

  double alpha = cfg.alpha0.value_or(1.0 / data_norm);
  const double stop_level = cfg.tol * data_norm;
  bool rank_adjusted = false;

  DenseMatrix& u = out.u;
  DenseMatrix& v = out.v;
  DenseMatrix& s = out.s;
  DenseMatrix& y = out.y;
  DenseMatrix t_prev(m, n);

  for (int k = 0; k < max_iter; ++k) {
    const double inv_alpha = 1.0 / alpha;

    DenseMatrix p = d - s + y * inv_alpha;
    auto [u_next, v_next] = bilinear_update(p, v, lambda * inv_alpha);
    u = std::move(u_next);
    v = std::move(v_next);

    DenseMatrix t = matmul_nt(u, v);
    const double change = relative_change(t, t_prev);
    DenseMatrix r = d - t;
    auto rs = r.data();
    auto ss = s.data();
    auto ys = y.data();
    for (std::size_t e = 0; e < rs.size(); ++e) {
      const double target = rs[e] + ys[e] * inv_alpha;
      ss[e] = mask.contains_flat(e) ? soft_threshold(target, inv_alpha) : target;
    }
    double residual_sq = 0.0;
    for (std::size_t e = 0; e < rs.size(); ++e) {
      const double gap = rs[e] - ss[e];
      ys[e] += alpha * gap;
      residual_sq += gap * gap;
    }

    const double residual = std::sqrt(residual_sq);
    const double objective = l1_norm(mask_project(s, mask)) + lambda * nuclear_norm(v);
    out.trace.push_back({k + 1, residual, objective, alpha, v.cols(), change});
    if (observer) observer({k + 1, u, v, s, y, alpha});

    alpha = std::min(cfg.rho * alpha, cfg.alpha_max);
    t_prev = std::move(t);

    if (residual < stop_level) {
      out.termination = Termination::converged;
      break;
    }

    if (cfg.adjust_rank && !rank_adjusted && k + 1 >= kFirstRankCheck && v.cols() >= 2 &&
        change < kRankSettleTol) {
      const RankDecision decision = adjust_rank_once(v, v.cols());
      if (decision.rank < v.cols()) {
        truncate_factors(decision, u, v);
        rank_adjusted = true;
        out.rank_adjusted_at = k + 1;
        out.trace.back().rank = v.cols();
      }
    }
  }

  s = mask_project(s, mask);
  return out;
}

SolveResult solve_rpca(const DenseMatrix& d, const SolverConfig& cfg,
                       const IterationObserver& observer) {
  return solve_rmc(d, ObservationMask::full(d.rows(), d.cols()), cfg, observer);
}

SolveResult solve_mc(const DenseMatrix& d_obs, const ObservationMask& mask, const SolverConfig& cfg,
                     const IterationObserver& observer) {
  cfg.validate();
  check_problem(d_obs, mask, cfg);

  const std::size_t m = d_obs.rows();
  const std::size_t n = d_obs.cols();
  const DenseMatrix d = mask_project(d_obs, mask);
  const double data_norm = frobenius_norm(d);
  const double lambda = cfg.lambda_for(m, n);
  const int max_iter = cfg.max_iter.value_or(kRmcDefaultMaxIter);

  SolveResult out;
  out.u = DenseMatrix::eye(m, cfg.rank);
  out.v = DenseMatrix(n, cfg.rank);
  out.s = DenseMatrix(m, n);
  out.y = DenseMatrix(m, n);
  if (data_norm == 0.0) {
    out.termination = Termination::converged;
    return out;
  }

  double alpha = cfg.alpha0.value_or(1.0 / data_norm);
  const double stop_level = cfg.tol * data_norm;
  bool rank_adjusted = false;

  DenseMatrix& u = out.u;
  DenseMatrix& v = out.v;
  DenseMatrix& y = out.y;
  DenseMatrix l = d;
  DenseMatrix t_prev(m, n);

  for (int k = 0; k < max_iter; ++k) {
    const double inv_alpha = 1.0 / alpha;

    DenseMatrix p = l + y * inv_alpha;
    auto [u_next, v_next] = bilinear_update(p, v, lambda * inv_alpha);
    u = std::move(u_next);
    v = std::move(v_next);
    DenseMatrix t = matmul_nt(u, v);

    // Entrywise minimizer of ½(d − l)²·[Ω] + y·(l − t) + (α/2)(l − t)².
    auto ls = l.data();
    auto ts = t.data();
    auto ds = d.data();
    auto ys = y.data();
    for (std::size_t e = 0; e < ls.size(); ++e) {
      const double pull = ts[e] - ys[e] * inv_alpha;
      ls[e] = mask.contains_flat(e) ? (ds[e] + alpha * pull) / (1.0 + alpha) : pull;
    }
    double residual_sq = 0.0;
    double fit_sq = 0.0;
    for (std::size_t e = 0; e < ls.size(); ++e) {
      const double gap = ls[e] - ts[e];
      ys[e] += alpha * gap;
      residual_sq += gap * gap;
      if (mask.contains_flat(e)) fit_sq += (ds[e] - ls[e]) * (ds[e] - ls[e]);
    }

    const double residual = std::sqrt(residual_sq);
    const double objective = 0.5 * fit_sq + lambda * nuclear_norm(v);
    const double change = relative_change(t, t_prev);
    out.trace.push_back({k + 1, residual, objective, alpha, v.cols(), change});
    if (observer) observer({k + 1, u, v, l, y, alpha});

    alpha = std::min(cfg.rho * alpha, cfg.alpha_max);
    t_prev = std::move(t);

    if (residual < stop_level || change < cfg.tol) {
      out.termination = Termination::converged;
      break;
    }

    if (cfg.adjust_rank && !rank_adjusted && k + 1 >= kFirstRankCheck && v.cols() >= 2 &&
        change < kRankSettleTol) {
      const RankDecision decision = adjust_rank_once(v, v.cols());
      if (decision.rank < v.cols()) {
        truncate_factors(decision, u, v);
        rank_adjusted = true;
        out.rank_adjusted_at = k + 1;
        out.trace.back().rank = v.cols();
      }
    }
  }
  return out;
}

}  // namespace rbf
