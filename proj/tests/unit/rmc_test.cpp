#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rbf/data.hpp"
#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"
#include "rbf/metrics.hpp"
#include "rbf/rmc.hpp"
#include "support/oracles.hpp"

using rbf::DenseMatrix;
using rbf::ObservationMask;
using rbf::SolverConfig;

namespace {

rbf::PlantedProblem planted(std::size_t m, std::size_t n, std::size_t r, double spikes, double obs,
                            std::uint64_t seed) {
  return rbf::generate_planted({m, n, r, spikes, 1.0, obs, seed});
}

SolverConfig with_rank(std::size_t d) {
  SolverConfig cfg;
  cfg.rank = d;
  return cfg;
}

}  // namespace

TEST(SolveRmc, RankOneFullyObserved) {
  const DenseMatrix d = rbf::matmul_nt(rbf::testing::random_matrix(30, 1, 1), rbf::testing::random_matrix(25, 1, 2));
  SolverConfig cfg = with_rank(3);
  cfg.tol = 1e-7;
  const auto res = rbf::solve_rpca(d, cfg);
  EXPECT_EQ(res.termination, rbf::Termination::converged);
  EXPECT_LE(rbf::relative_error(res.low_rank(), d), 1e-4);
}

TEST(SolveRmc, PlantedRecovery) {
  const auto p = planted(100, 100, 3, 0.1, 0.7, 7);
  const auto res = rbf::solve_rmc(p.d_obs, p.mask, with_rank(6));
  EXPECT_EQ(res.termination, rbf::Termination::converged);
  EXPECT_LE(rbf::relative_error(res.low_rank(), p.l0), 5e-2);
  const auto scored = rbf::outlier_scores(res.s, p.s0, p.mask);
  EXPECT_GE(rbf::auc(scored.scores, scored.labels), 0.95);
}

TEST(SolveRmc, IgnoresEntriesOffMask) {
  const auto p = planted(40, 30, 2, 0.05, 0.6, 3);
  DenseMatrix polluted = p.d_obs;
  for (std::size_t k = 0; k < polluted.size(); ++k)
    if (!p.mask.contains_flat(k)) polluted.data()[k] = 1e3;
  const auto a = rbf::solve_rmc(p.d_obs, p.mask, with_rank(4));
  const auto b = rbf::solve_rmc(polluted, p.mask, with_rank(4));
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.s, b.s);
}

TEST(SolveRmc, IterateInvariants) {
  const auto p = planted(40, 35, 3, 0.1, 0.7, 5);
  const DenseMatrix d = rbf::mask_project(p.d_obs, p.mask);
  SolverConfig cfg = with_rank(5);
  cfg.max_iter = 60;

  DenseMatrix s_prev(40, 35);
  DenseMatrix y_prev(40, 35);
  double alpha_prev = 0.0;
  std::vector<double> alphas;
  int checked = 0;
  const auto res = rbf::solve_rmc(p.d_obs, p.mask, cfg, [&](const rbf::IterateView& it) {
    // Orthonormal U after every update.
    EXPECT_LE(rbf::testing::max_abs_diff(rbf::matmul_tn(it.u, it.u), DenseMatrix::identity(it.u.cols())), 1e-8);
    // Off Ω, S equals the residual target exactly.
    const DenseMatrix t = rbf::matmul_nt(it.u, it.v);
    const double inv_alpha = 1.0 / it.alpha;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (p.mask.contains_flat(k)) continue;
      const double target = d.data()[k] - t.data()[k] + y_prev.data()[k] * inv_alpha;
      ASSERT_EQ(it.s.data()[k], target);
      ASSERT_EQ(it.y.data()[k], 0.0);
    }
    EXPECT_LE(rbf::max_abs(it.y), 1.0 + 1e-6);
    if (alpha_prev > 0.0) EXPECT_EQ(it.alpha, std::min(cfg.rho * alpha_prev, cfg.alpha_max));
    alpha_prev = it.alpha;
    s_prev = it.s;
    y_prev = it.y;
    ++checked;
  });
  EXPECT_EQ(checked, res.iterations());
  for (std::size_t k = 0; k < res.s.size(); ++k)
    if (!p.mask.contains_flat(k)) EXPECT_EQ(res.s.data()[k], 0.0);
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    EXPECT_EQ(res.trace[k].alpha, std::min(cfg.rho * res.trace[k - 1].alpha, cfg.alpha_max));
    EXPECT_TRUE(std::isfinite(res.trace[k].objective));
  }
}

TEST(SolveRmc, AlphaCapIsRespected) {
  const auto p = planted(30, 30, 2, 0.05, 0.8, 2);
  SolverConfig cfg = with_rank(4);
  cfg.alpha0 = 1.0;
  cfg.alpha_max = 2.0;
  cfg.max_iter = 20;
  const auto res = rbf::solve_rmc(p.d_obs, p.mask, cfg);
  EXPECT_EQ(res.trace.back().alpha, 2.0);
}

TEST(SolveRmc, PolarReferenceAgrees) {
  const auto p = planted(50, 40, 5, 0.1, 0.8, 21);
  SolverConfig cfg = with_rank(5);
  cfg.lambda = 1.0;
  cfg.alpha0 = 1.0;
  cfg.max_iter = 20;
  cfg.tol = 1e-14;
  const auto ref = rbf::testing::reference_rmc_polar(p.d_obs, p.mask, 1.0, 5, 1.0, cfg.rho, cfg.alpha_max, 20);
  int k = 0;
  rbf::solve_rmc(p.d_obs, p.mask, cfg, [&](const rbf::IterateView& it) {
    const auto& r = ref[static_cast<std::size_t>(k++)];
    const DenseMatrix t = rbf::matmul_nt(it.u, it.v);
    EXPECT_LE(rbf::frobenius_norm(t - rbf::testing::from_eigen(r.t)), 1e-8 * rbf::frobenius_norm(t));
    EXPECT_NEAR(rbf::nuclear_norm(it.v), r.v_nuclear, 1e-8);
    EXPECT_LE(rbf::frobenius_norm(it.s - rbf::testing::from_eigen(r.s)), 1e-8);
    EXPECT_LE(rbf::frobenius_norm(it.y - rbf::testing::from_eigen(r.y)), 1e-8);
  });
  EXPECT_EQ(k, 20);
}

TEST(SolveRmc, StopsAtIterationCap) {
  const auto p = planted(30, 30, 2, 0.1, 0.8, 4);
  SolverConfig cfg = with_rank(4);
  cfg.max_iter = 5;
  const auto res = rbf::solve_rmc(p.d_obs, p.mask, cfg);
  EXPECT_EQ(res.termination, rbf::Termination::max_iter_reached);
  EXPECT_EQ(res.iterations(), 5);
}

TEST(SolveRmc, ErrorsOnBadInput) {
  const auto p = planted(10, 8, 2, 0.0, 0.8, 1);
  EXPECT_THROW(rbf::solve_rmc(p.d_obs, p.mask, with_rank(9)), rbf::ArgumentError);
  EXPECT_THROW(rbf::solve_rmc(DenseMatrix(10, 9), p.mask, with_rank(2)), rbf::DimensionError);
  const std::vector<ObservationMask::Entry> none;
  EXPECT_THROW(rbf::solve_rmc(p.d_obs, ObservationMask(10, 8, none), with_rank(2)), rbf::ArgumentError);
  SolverConfig bad = with_rank(2);
  bad.tol = 0.0;
  EXPECT_THROW(rbf::solve_rmc(p.d_obs, p.mask, bad), rbf::ArgumentError);
}

TEST(SolveRpca, ZeroInput) {
  const auto res = rbf::solve_rpca(DenseMatrix(12, 10), with_rank(3));
  EXPECT_EQ(res.low_rank(), DenseMatrix(12, 10));
  EXPECT_EQ(res.s, DenseMatrix(12, 10));
  EXPECT_EQ(res.termination, rbf::Termination::converged);
}

TEST(SolveRpca, ResidualReachesTolerance) {
  const auto p = planted(100, 100, 3, 0.05, 1.0, 9);
  const auto res = rbf::solve_rpca(p.d_obs, with_rank(6));
  ASSERT_EQ(res.termination, rbf::Termination::converged);
  EXPECT_LT(res.trace.back().residual, 1e-4 * rbf::frobenius_norm(p.d_obs));
  EXPECT_LE(rbf::relative_error(res.low_rank(), p.l0), 1e-2);
}

TEST(SolveMc, SmallLambdaReproducesFullyObservedData) {
  const DenseMatrix d = rbf::matmul_nt(rbf::testing::random_matrix(30, 3, 1), rbf::testing::random_matrix(20, 3, 2));
  SolverConfig cfg = with_rank(5);
  cfg.lambda = 1e-4;
  cfg.tol = 1e-8;
  cfg.max_iter = 2000;
  const auto res = rbf::solve_mc(d, ObservationMask::full(30, 20), cfg);
  EXPECT_LE(rbf::relative_error(res.low_rank(), d), 1e-3);
}

TEST(SolveMc, PlantedCompletion) {
  const auto p = planted(100, 120, 4, 0.0, 0.5, 12);
  SolverConfig cfg = with_rank(4);
  cfg.lambda = 0.1;
  cfg.tol = 1e-6;
  cfg.max_iter = 2000;
  const auto res = rbf::solve_mc(p.d_obs, p.mask, cfg);
  const DenseMatrix l = res.low_rank();
  const ObservationMask held_out = p.mask.complement();
  const double err = rbf::frobenius_norm(rbf::mask_project(l - p.l0, held_out)) /
                     rbf::frobenius_norm(rbf::mask_project(p.l0, held_out));
  EXPECT_LE(err, 1e-2);
  EXPECT_EQ(res.s, DenseMatrix(100, 120));
}

TEST(SolveMc, RatingsBeatGlobalMean) {
  const auto data = rbf::generate_ratings({300, 200, 5, 0.3, 0.3, 2});
  const auto train = rbf::ratings_to_matrix(data, data.train);
  std::vector<rbf::Rating> test;
  double mean = 0.0;
  for (std::size_t k : data.train) mean += data.triplets[k].value;
  mean /= static_cast<double>(data.train.size());
  for (std::size_t k : data.test) test.push_back(data.triplets[k]);
  SolverConfig cfg = with_rank(5);
  cfg.lambda = 3.0;
  const auto res = rbf::solve_mc(train.values, train.mask, cfg);
  EXPECT_LT(rbf::rmse(res.low_rank(), test), rbf::rmse(DenseMatrix(300, 200, mean), test));
}

TEST(AdjustRank, ClearGap) {
  const std::vector<double> sv{10, 9.5, 9, 1e-4, 1e-4};
  const auto q = rbf::qr_thin(rbf::testing::random_matrix(12, 5, 3)).q;
  const DenseMatrix v = rbf::matmul(q, rbf::DenseMatrix::diagonal(sv));
  const auto decision = rbf::adjust_rank_once(v, 5);
  EXPECT_EQ(decision.rank, 3u);
  EXPECT_GE(decision.gap, rbf::kRankGapThreshold);
  // Quotients of eigenvalues σ²: 100/90.25, 90.25/81, 81/1e-8, 1.
  const std::vector<double> qs{100.0 / 90.25, 90.25 / 81.0, 81.0 / 1e-8, 1.0};
  const double expected_gap = 4.0 * qs[2] / (qs[0] + qs[1] + qs[3]);
  EXPECT_NEAR(decision.gap / expected_gap, 1.0, 1e-6);
  EXPECT_EQ(decision.eigenvectors.cols(), 3u);
}

TEST(AdjustRank, FlatSpectrumUnchanged) {
  const auto q = rbf::qr_thin(rbf::testing::random_matrix(8, 4, 1)).q;
  const auto decision = rbf::adjust_rank_once(q, 4);
  EXPECT_EQ(decision.rank, 4u);
  // All three quotients equal 1: gap = 3·1 / (1 + 1).
  EXPECT_NEAR(decision.gap, 1.5, 1e-9);
}

TEST(AdjustRank, WidthMismatchThrows) {
  EXPECT_THROW(rbf::adjust_rank_once(DenseMatrix(5, 3), 4), rbf::DimensionError);
}

TEST(AdjustRank, SolverReducesOverestimatedRankOnce) {
  const auto p = planted(200, 200, 5, 0.1, 0.7, 1);
  SolverConfig cfg = with_rank(10);
  cfg.adjust_rank = true;
  const auto res = rbf::solve_rmc(p.d_obs, p.mask, cfg);
  EXPECT_EQ(res.v.cols(), 5u);
  ASSERT_TRUE(res.rank_adjusted_at.has_value());
  int changes = 0;
  for (std::size_t k = 1; k < res.trace.size(); ++k) changes += res.trace[k].rank != res.trace[k - 1].rank;
  EXPECT_LE(changes, 1);
  EXPECT_LE(rbf::testing::max_abs_diff(rbf::matmul_tn(res.u, res.u), DenseMatrix::identity(5)), 1e-8);
}
