#include "rbf/prox.hpp"

#include <cmath>

#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"

namespace rbf {

DenseMatrix svt(const DenseMatrix& m, double mu) {
  if (!(mu >= 0.0)) throw ArgumentError("svt: threshold must be nonnegative");
  const ThinSvd f = svd_thin(m);
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < f.rank(); ++k) {
    const double shrunk = f.sigma[k] - mu;
    if (shrunk <= 0.0) break;  // sigma is nonincreasing
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double ui = f.u(i, k) * shrunk;
      auto row = out.row(i);
      for (std::size_t j = 0; j < m.cols(); ++j) row[j] += ui * f.v(j, k);
    }
  }
  return out;
}

DenseMatrix soft_threshold(const DenseMatrix& a, double tau) {
  if (!(tau >= 0.0)) throw ArgumentError("soft_threshold: threshold must be nonnegative");
  DenseMatrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = soft_threshold(src[k], tau);
  return out;
}

}  // namespace rbf
