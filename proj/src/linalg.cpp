#include "rbf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rbf/errors.hpp"

namespace rbf {
namespace {

// Column-major scratch copy; the Householder and Jacobi sweeps walk columns.
std::vector<std::vector<double>> to_columns(const DenseMatrix& a) {
  std::vector<std::vector<double>> cols(a.cols(), std::vector<double>(a.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) cols[j][i] = a(i, j);
  return cols;
}

double dot_tail(const std::vector<double>& x, const std::vector<double>& y, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void require_finite(const DenseMatrix& a, const char* what) {
  if (!a.all_finite()) throw ArgumentError(std::string(what) + ": non-finite input");
}

}  // namespace

QrFactors qr_thin(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t d = a.cols();
  if (m < d) throw DimensionError("qr_thin: needs rows >= cols");
  require_finite(a, "qr_thin");

  auto cols = to_columns(a);
  std::vector<std::vector<double>> reflectors(d);
  std::vector<double> taus(d, 0.0);
  DenseMatrix r(d, d);

  for (std::size_t k = 0; k < d; ++k) {
    auto& x = cols[k];
    const double norm = std::sqrt(dot_tail(x, x, k));
    for (std::size_t i = 0; i < k; ++i) r(i, k) = x[i];
    if (norm == 0.0) continue;  // identity reflector, R(k,k) = 0

    const double alpha = x[k] >= 0.0 ? -norm : norm;
    std::vector<double> v(m, 0.0);
    for (std::size_t i = k; i < m; ++i) v[i] = x[i];
    v[k] -= alpha;
    const double vtv = dot_tail(v, v, k);
    const double tau = 2.0 / vtv;

    for (std::size_t j = k + 1; j < d; ++j) {
      auto& c = cols[j];
      const double w = tau * dot_tail(v, c, k);
      for (std::size_t i = k; i < m; ++i) c[i] -= w * v[i];
    }
    r(k, k) = alpha;
    reflectors[k] = std::move(v);
    taus[k] = tau;
  }

  // Q = H_0 H_1 ... H_{d-1} applied to the first d canonical vectors.
  std::vector<std::vector<double>> qcols(d, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < d; ++j) qcols[j][j] = 1.0;
  for (std::size_t kk = d; kk-- > 0;) {
    if (taus[kk] == 0.0) continue;
    const auto& v = reflectors[kk];
    for (std::size_t j = kk; j < d; ++j) {
      auto& c = qcols[j];
      const double w = taus[kk] * dot_tail(v, c, kk);
      if (w == 0.0) continue;
      for (std::size_t i = kk; i < m; ++i) c[i] -= w * v[i];
    }
  }

  DenseMatrix q(m, d);
  for (std::size_t j = 0; j < d; ++j) {
    const double sign = r(j, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) q(i, j) = sign * qcols[j][i];
    if (sign < 0.0)
      for (std::size_t c = j; c < d; ++c) r(j, c) = -r(j, c);
  }
  return {std::move(q), std::move(r)};
}

ThinSvd svd_thin(const DenseMatrix& a) {
  require_finite(a, "svd_thin");
  if (a.rows() < a.cols()) {
    ThinSvd t = svd_thin(a.transpose());
    std::swap(t.u, t.v);
    return t;
  }
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();

  auto g = to_columns(a);
  std::vector<std::vector<double>> w(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) w[j][j] = 1.0;

  constexpr double kOrthTol = 1e-15;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double alpha = dot_tail(g[p], g[p], 0);
        const double beta = dot_tail(g[q], g[q], 0);
        const double gamma = dot_tail(g[p], g[q], 0);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kOrthTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double gp = g[p][i];
          const double gq = g[q][i];
          g[p][i] = c * gp - s * gq;
          g[q][i] = s * gp + c * gq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double wp = w[p][i];
          const double wq = w[q][i];
          w[p][i] = c * wp - s * wq;
          w[q][i] = s * wp + c * wq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(d);
  for (std::size_t j = 0; j < d; ++j) norms[j] = std::sqrt(dot_tail(g[j], g[j], 0));
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double smax = d == 0 ? 0.0 : norms[order.front()];
  std::size_t rank = 0;
  while (rank < d && smax > 0.0 && norms[order[rank]] > kRankCutoff * smax) ++rank;

  ThinSvd out{DenseMatrix(n, rank), std::vector<double>(rank), DenseMatrix(d, rank)};
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t j = order[k];
    const double s = norms[j];
    out.sigma[k] = s;
    for (std::size_t i = 0; i < n; ++i) out.u(i, k) = g[j][i] / s;
    for (std::size_t i = 0; i < d; ++i) out.v(i, k) = w[j][i];
  }
  return out;
}

double nuclear_norm(const DenseMatrix& a) {
  const auto svd = svd_thin(a);
  return std::accumulate(svd.sigma.begin(), svd.sigma.end(), 0.0);
}

double spectral_norm(const MatrixOperator& gram, const PowerIterationOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  DenseMatrix x(gram.rows, gram.cols);
  for (double& e : x.data()) e = normal(rng);
  x *= 1.0 / frobenius_norm(x);

  double estimate = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < options.max_iter; ++it) {
    DenseMatrix y = gram.apply(x);
    require_same_shape(x, y, "spectral_norm");
    const double rayleigh = inner(x, y);
    const double norm = frobenius_norm(y);
    if (norm == 0.0) return 0.0;
    if (std::abs(rayleigh - estimate) <= options.rel_tol * std::abs(rayleigh)) return rayleigh;
    estimate = rayleigh;
    x = std::move(y);
    x *= 1.0 / norm;
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge", estimate);
}

}  // namespace rbf
