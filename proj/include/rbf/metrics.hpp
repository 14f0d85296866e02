#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbf/data.hpp"
#include "rbf/dense_matrix.hpp"
#include "rbf/measurement.hpp"

namespace rbf {

/// √(mean squared error) of `predicted` over the test triplets.
double rmse(const DenseMatrix& predicted, std::span<const Rating> truth);

/// ‖l_hat − l_ref‖_F / ‖l_ref‖_F.
double relative_error(const DenseMatrix& l_hat, const DenseMatrix& l_ref);

/// Area under the ROC curve in the Mann–Whitney form: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting ½. Computed
/// from midranks in O(N log N). Throws ArgumentError unless both classes are
/// present.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct OutlierScores {
  std::vector<double> scores;        // |Ŝᵢⱼ| on Ω
  std::vector<std::uint8_t> labels;  // planted support of S₀ on Ω
};

/// Scores and labels over the observed entries, in flat-index order.
OutlierScores outlier_scores(const DenseMatrix& s_hat, const DenseMatrix& s0,
                             const ObservationMask& mask);

}  // namespace rbf
