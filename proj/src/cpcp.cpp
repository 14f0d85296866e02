#include "rbf/cpcp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"
#include "rbf/prox.hpp"

namespace rbf {
namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// P(x) − y − Y/α, the shifted measurement residual.
std::vector<double> shifted_residual(std::span<const double> px, std::span<const double> y,
                                     std::span<const double> multiplier, double alpha) {
  std::vector<double> r(px.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = px[i] - y[i] - multiplier[i] / alpha;
  return r;
}

DenseMatrix gradient_from(const LinearMeasurement& op, std::span<const double> px,
                          std::span<const double> y, std::span<const double> multiplier,
                          double alpha) {
  auto r = shifted_residual(px, y, multiplier, alpha);
  for (double& x : r) x *= alpha;
  return op.adjoint(r);
}

std::vector<double> sum_forward(const LinearMeasurement& op, const DenseMatrix& a,
                                const DenseMatrix& b) {
  return op.forward(a + b);
}

// Mutable state of one solve; `t` caches U·Vᵀ.
struct CpcpState {
  DenseMatrix u;
  DenseMatrix v;
  DenseMatrix s;
  DenseMatrix t;
  std::vector<double> y;
  double alpha;
  double tau;
};

}  // namespace

double measurement_penalty(const LinearMeasurement& op, const DenseMatrix& x,
                           std::span<const double> y, std::span<const double> multiplier,
                           double alpha) {
  const auto px = op.forward(x);
  const auto r = shifted_residual(px, y, multiplier, alpha);
  const double n = norm2(r);
  return 0.5 * alpha * n * n;
}

DenseMatrix measurement_gradient(const LinearMeasurement& op, const DenseMatrix& x,
                                 std::span<const double> y, std::span<const double> multiplier,
                                 double alpha) {
  if (y.size() != op.measurement_count() || multiplier.size() != op.measurement_count())
    throw DimensionError("measurement_gradient: vector length mismatch");
  return gradient_from(op, op.forward(x), y, multiplier, alpha);
}

SolveResult solve_cpcp(std::span<const double> y_meas, const LinearMeasurement& op,
                       const SolverConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  const std::size_t m = op.rows();
  const std::size_t n = op.cols();
  const std::size_t p = op.measurement_count();
  if (p < 1) throw ArgumentError("solve_cpcp: operator has no measurements");
  if (y_meas.size() != p)
    throw DimensionError("solve_cpcp: " + std::to_string(y_meas.size()) + " measurements for an operator with " +
                         std::to_string(p));
  if (!std::all_of(y_meas.begin(), y_meas.end(), [](double x) { return std::isfinite(x); }))
    throw ArgumentError("solve_cpcp: non-finite measurements");
  if (cfg.rank > std::min(m, n)) throw ArgumentError("rank exceeds min(rows, cols)");

  const double lambda = cfg.lambda_for(m, n);
  const int max_iter = cfg.max_iter.value_or(kCpcpDefaultMaxIter);
  const double y_norm = norm2(y_meas);

  SolveResult out;
  out.u = DenseMatrix::eye(m, cfg.rank);
  out.v = DenseMatrix(n, cfg.rank);
  out.s = DenseMatrix(m, n);
  out.y_measurements.assign(p, 0.0);
  if (y_norm == 0.0) {
    out.termination = Termination::converged;
    return out;
  }

  PowerIterationOptions power;
  power.seed = cfg.seed;
  const double gram_norm = spectral_norm({m, n, [&](const DenseMatrix& x) { return op.project(x); }}, power);

  CpcpState st{std::move(out.u), std::move(out.v), std::move(out.s), DenseMatrix(m, n),
               std::move(out.y_measurements), cfg.alpha0.value_or(1.0 / y_norm), 1.0 / gram_norm};
  std::vector<double> p_ts = op.forward(st.t + st.s);  // P(T_k + S_k)

  for (int k = 0; k < max_iter; ++k) {
    const double alpha = st.alpha;
    const double step = st.tau / alpha;

    // T-block: gradient step on the linearized penalty, then the U/V update.
    DenseMatrix w = st.t - gradient_from(op, p_ts, y_meas, st.y, alpha) * step;
    DenseMatrix u = qr_thin(matmul(w, st.v)).q;
    DenseMatrix wtu = matmul_tn(w, u);
    assert(std::min(wtu.rows(), wtu.cols()) <= st.v.cols());
    DenseMatrix v = svt(wtu, lambda / alpha);
    DenseMatrix t = matmul_nt(u, v);

    // S-block, linearized at S_k with T_{k+1}.
    const auto p_st = sum_forward(op, st.s, t);
    DenseMatrix s = soft_threshold(st.s - gradient_from(op, p_st, y_meas, st.y, alpha) * step,
                                   1.0 / alpha);

    p_ts = sum_forward(op, t, s);
    double feas_sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double gap = y_meas[i] - p_ts[i];
      st.y[i] += alpha * gap;
      feas_sq += gap * gap;
    }

    const double base = inner(st.t, st.t) + inner(st.s, st.s);
    const double dt = frobenius_norm(t - st.t);
    const double ds = frobenius_norm(s - st.s);
    const bool ratio_defined = k > 0 && base >= 1e-30;
    const double ratio = ratio_defined ? (dt * dt + ds * ds) / base : 0.0;

    st.u = std::move(u);
    st.v = std::move(v);
    st.s = std::move(s);
    st.t = std::move(t);

    const double objective = l1_norm(st.s) + lambda * nuclear_norm(st.v);
    out.trace.push_back({k + 1, std::sqrt(feas_sq), objective, alpha, st.v.cols(), ratio});
    if (observer) observer({k + 1, st.u, st.v, st.s, DenseMatrix(), alpha});

    st.alpha = std::min(cfg.rho * alpha, cfg.alpha_max);
    if (ratio_defined && ratio < cfg.tol) {
      out.termination = Termination::converged;
      break;
    }
  }

  out.u = std::move(st.u);
  out.v = std::move(st.v);
  out.s = std::move(st.s);
  out.y_measurements = std::move(st.y);
  out.tau = st.tau;
  return out;
}

}  // namespace rbf
