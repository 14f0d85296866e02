#include "rbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rbf/errors.hpp"

namespace rbf {

double rmse(const DenseMatrix& predicted, std::span<const Rating> truth) {
  if (truth.empty()) throw ArgumentError("rmse: empty test set");
  double sum = 0.0;
  for (const Rating& t : truth) {
    if (t.user >= predicted.rows() || t.item >= predicted.cols())
      throw DimensionError("rmse: test entry outside the predicted matrix");
    const double e = t.value - predicted(t.user, t.item);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double relative_error(const DenseMatrix& l_hat, const DenseMatrix& l_ref) {
  require_same_shape(l_hat, l_ref, "relative_error");
  const double ref = frobenius_norm(l_ref);
  if (ref == 0.0) throw ArgumentError("relative_error: reference has zero norm");
  return frobenius_norm(l_hat - l_ref) / ref;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks (1-based) summed over positives.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    lo = hi;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw ArgumentError("auc: needs both classes");

  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

OutlierScores outlier_scores(const DenseMatrix& s_hat, const DenseMatrix& s0,
                             const ObservationMask& mask) {
  require_same_shape(s_hat, s0, "outlier_scores");
  if (s_hat.rows() != mask.rows() || s_hat.cols() != mask.cols())
    throw DimensionError("outlier_scores: mask shape mismatch");
  OutlierScores out;
  out.scores.reserve(mask.count());
  out.labels.reserve(mask.count());
  auto sh = s_hat.data();
  auto st = s0.data();
  for (std::size_t k : mask.flat_indices()) {
    out.scores.push_back(std::abs(sh[k]));
    out.labels.push_back(st[k] != 0.0 ? 1 : 0);
  }
  return out;
}

}  // namespace rbf
