#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "rbf/dense_matrix.hpp"
#include "rbf/errors.hpp"
#include "support/oracles.hpp"

using rbf::DenseMatrix;

TEST(DenseMatrix, ConstructionAndAccess) {
  DenseMatrix a(2, 3, 1.5);
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a(1, 2), 1.5);
  a(0, 1) = -2.0;
  EXPECT_EQ(a.data()[1], -2.0);
  EXPECT_EQ(a.row(1).size(), 3u);
}

TEST(DenseMatrix, RejectsBadEntries) {
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), rbf::DimensionError);
  EXPECT_THROW(DenseMatrix(1, 2, std::vector<double>{1, std::numeric_limits<double>::quiet_NaN()}),
               rbf::ArgumentError);
}

TEST(DenseMatrix, Builders) {
  const DenseMatrix e = DenseMatrix::eye(4, 2);
  EXPECT_EQ(e(0, 0), 1.0);
  EXPECT_EQ(e(1, 1), 1.0);
  EXPECT_EQ(e(2, 0), 0.0);
  EXPECT_EQ(DenseMatrix::identity(3), DenseMatrix::eye(3, 3));
  const std::vector<double> diag{3.0, 1.0};
  EXPECT_EQ(DenseMatrix::diagonal(diag), DenseMatrix::from_rows({{3, 0}, {0, 1}}));
}

TEST(DenseMatrix, ProductsMatchEigen) {
  const DenseMatrix a = rbf::testing::random_matrix(5, 4, 1);
  const DenseMatrix b = rbf::testing::random_matrix(4, 3, 2);
  const DenseMatrix c = rbf::testing::random_matrix(5, 3, 3);
  using rbf::testing::to_eigen;
  using rbf::testing::from_eigen;
  EXPECT_LT(rbf::testing::max_abs_diff(rbf::matmul(a, b), from_eigen(to_eigen(a) * to_eigen(b))), 1e-13);
  EXPECT_LT(rbf::testing::max_abs_diff(rbf::matmul_tn(a, c), from_eigen(to_eigen(a).transpose() * to_eigen(c))),
            1e-13);
  EXPECT_LT(rbf::testing::max_abs_diff(rbf::matmul_nt(c, b), from_eigen(to_eigen(c) * to_eigen(b).transpose())),
            1e-13);
  EXPECT_THROW(rbf::matmul(a, c), rbf::DimensionError);
}

TEST(DenseMatrix, Norms) {
  const DenseMatrix a = DenseMatrix::from_rows({{3, -4}, {0, 1}});
  EXPECT_DOUBLE_EQ(rbf::frobenius_norm(a), std::sqrt(26.0));
  EXPECT_DOUBLE_EQ(rbf::l1_norm(a), 8.0);
  EXPECT_DOUBLE_EQ(rbf::max_abs(a), 4.0);
  EXPECT_DOUBLE_EQ(rbf::inner(a, a), 26.0);
  EXPECT_EQ(a.transpose().transpose(), a);
  EXPECT_EQ(a.leading_columns(1), DenseMatrix::from_rows({{3}, {0}}));
}

TEST(DenseMatrix, Arithmetic) {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(a + a, 2.0 * a);
  EXPECT_EQ(a - a, DenseMatrix(2, 2));
  EXPECT_EQ(-a, a * -1.0);
  EXPECT_THROW(a + DenseMatrix(3, 2), rbf::DimensionError);
}
