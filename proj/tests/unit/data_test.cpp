#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rbf/data.hpp"
#include "rbf/errors.hpp"
#include "rbf/linalg.hpp"
#include "support/oracles.hpp"

using rbf::DenseMatrix;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rbf_data_test_" + name);
}

}  // namespace

TEST(GeneratePlanted, Reproducible) {
  const rbf::PlantedSpec spec{40, 30, 3, 0.1, 1.0, 0.7, 5};
  const auto a = rbf::generate_planted(spec);
  const auto b = rbf::generate_planted(spec);
  EXPECT_EQ(a.l0, b.l0);
  EXPECT_EQ(a.s0, b.s0);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.d_obs, b.d_obs);
  EXPECT_EQ(rbf::svd_thin(a.l0).rank(), 3u);
  EXPECT_EQ(a.d_obs, rbf::mask_project(a.l0 + a.s0, a.mask));
}

TEST(GeneratePlanted, DegenerateFractions) {
  const auto p = rbf::generate_planted({20, 20, 2, 0.0, 1.0, 1.0, 1});
  EXPECT_EQ(p.s0, DenseMatrix(20, 20));
  EXPECT_TRUE(p.mask.is_full());
}

TEST(GeneratePlanted, ObservedFractionWithinBinomialBounds) {
  const double frac = 0.7;
  const double n = 2500.0;
  const double sigma = std::sqrt(n * frac * (1 - frac));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = rbf::generate_planted({50, 50, 2, 0.1, 1.0, frac, seed});
    EXPECT_LE(std::abs(static_cast<double>(p.mask.count()) - n * frac), 3.0 * sigma);
    for (double x : p.s0.data()) EXPECT_TRUE(x == 0.0 || std::abs(x) == 1.0);
  }
}

TEST(GeneratePlanted, Validation) {
  EXPECT_THROW(rbf::generate_planted({5, 5, 6, 0.0, 1.0, 1.0, 1}), rbf::ArgumentError);
  EXPECT_THROW(rbf::generate_planted({5, 5, 2, 1.5, 1.0, 1.0, 1}), rbf::ArgumentError);
  EXPECT_THROW(rbf::generate_planted({0, 5, 1, 0.0, 1.0, 1.0, 1}), rbf::ArgumentError);
}

TEST(GenerateRatings, RangeRankAndSplit) {
  const auto data = rbf::generate_ratings({60, 40, 5, 0.5, 0.0, 3});
  for (const auto& r : data.triplets) {
    EXPECT_GE(r.value, 1.0);
    EXPECT_LE(r.value, 5.0);
  }
  EXPECT_EQ(data.test.size(), data.triplets.size() / 10);
  EXPECT_EQ(data.test.size() + data.train.size(), data.triplets.size());
}

TEST(ParseRatings, DoubleColonFormat) {
  std::istringstream in("1::5::3.0::978300760\n");
  const auto data = rbf::parse_ratings(in, 0);
  ASSERT_EQ(data.triplets.size(), 1u);
  EXPECT_EQ(data.triplets[0].user, 0u);
  EXPECT_EQ(data.triplets[0].item, 0u);
  EXPECT_EQ(data.triplets[0].value, 3.0);
}

TEST(ParseRatings, SeparatorsAndRemap) {
  std::istringstream in("10 7 4\n3,7,2.5\n10\t2\t1 99\n");
  const auto data = rbf::parse_ratings(in, 0);
  EXPECT_EQ(data.num_users, 2u);
  EXPECT_EQ(data.num_items, 2u);
  ASSERT_EQ(data.triplets.size(), 3u);
  // Users {3, 10} -> {0, 1}; items {2, 7} -> {0, 1}.
  EXPECT_EQ(data.triplets[0].user, 1u);
  EXPECT_EQ(data.triplets[0].item, 1u);
  EXPECT_EQ(data.triplets[1].user, 0u);
}

TEST(ParseRatings, DuplicatesKeepLastValue) {
  std::istringstream in("1 1 2\n1 2 3\n1 1 5\n");
  const auto data = rbf::parse_ratings(in, 0);
  EXPECT_EQ(data.duplicates, 1u);
  ASSERT_EQ(data.triplets.size(), 2u);
  const auto it = std::find_if(data.triplets.begin(), data.triplets.end(),
                               [](const rbf::Rating& r) { return r.user == 0 && r.item == 0; });
  ASSERT_NE(it, data.triplets.end());
  EXPECT_EQ(it->value, 5.0);
}

TEST(ParseRatings, Errors) {
  std::istringstream bad("1 2 3\n1 x 3\n");
  try {
    rbf::parse_ratings(bad, 0);
    FAIL() << "expected ParseError";
  } catch (const rbf::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(rbf::parse_ratings(empty, 0), rbf::ArgumentError);
  std::istringstream short_line("1 2\n");
  EXPECT_THROW(rbf::parse_ratings(short_line, 0), rbf::ParseError);
}

TEST(SplitRatings, TenLinePartition) {
  std::ostringstream text;
  for (int i = 1; i <= 10; ++i) text << i << ' ' << (i % 3 + 1) << ' ' << (i % 5 + 1) << '\n';
  std::istringstream in(text.str());
  const auto data = rbf::parse_ratings(in, 42);
  EXPECT_EQ(data.train.size(), 9u);
  EXPECT_EQ(data.test.size(), 1u);
  std::set<std::size_t> all(data.train.begin(), data.train.end());
  all.insert(data.test.begin(), data.test.end());
  EXPECT_EQ(all.size(), 10u);
  std::istringstream again(text.str());
  EXPECT_EQ(rbf::parse_ratings(again, 42).test, data.test);
}

TEST(SplitRatings, PartitionProperty) {
  auto data = rbf::generate_ratings({50, 30, 3, 0.4, 0.1, 8});
  std::vector<std::size_t> merged = data.train;
  merged.insert(merged.end(), data.test.begin(), data.test.end());
  std::sort(merged.begin(), merged.end());
  for (std::size_t k = 0; k < merged.size(); ++k) ASSERT_EQ(merged[k], k);
}

TEST(RatingsToMatrix, PlacesValues) {
  std::istringstream in("1 1 4\n2 2 3\n");
  const auto data = rbf::parse_ratings(in, 0);
  const std::vector<std::size_t> all{0, 1};
  const auto rm = rbf::ratings_to_matrix(data, all);
  EXPECT_EQ(rm.values, DenseMatrix::from_rows({{4, 0}, {0, 3}}));
  EXPECT_EQ(rm.mask.count(), 2u);
}

TEST(MatrixIo, ParseAndRoundTrip) {
  std::istringstream in("2 2\n1 2\n3 4\n");
  EXPECT_EQ(rbf::parse_matrix(in), DenseMatrix::from_rows({{1, 2}, {3, 4}}));
  const DenseMatrix a = rbf::testing::random_matrix(7, 5, 3) * 1e-3;
  const auto path = temp_path("matrix.txt");
  rbf::save_matrix(path, a);
  EXPECT_EQ(rbf::load_matrix(path), a);
  std::filesystem::remove(path);
}

TEST(MatrixIo, Errors) {
  std::istringstream zero("0 0\n");
  EXPECT_THROW(rbf::parse_matrix(zero), rbf::ParseError);
  std::istringstream short_row("2 2\n1 2\n3\n");
  EXPECT_THROW(rbf::parse_matrix(short_row), rbf::ParseError);
  std::istringstream junk("1 2\n1 q\n");
  EXPECT_THROW(rbf::parse_matrix(junk), rbf::ParseError);
  EXPECT_THROW(rbf::load_matrix(temp_path("does_not_exist")), std::runtime_error);
}

TEST(MaskIo, RoundTrip) {
  const auto p = rbf::generate_planted({6, 5, 1, 0.0, 1.0, 0.5, 2});
  std::stringstream buf;
  rbf::write_mask(buf, p.mask);
  EXPECT_EQ(rbf::parse_mask(buf), p.mask);
  std::istringstream bad("2 2\n0 5\n");
  EXPECT_THROW(rbf::parse_mask(bad), std::exception);
}

TEST(TripletIo, RoundTrip) {
  const std::vector<rbf::Rating> t{{0, 1, 2.5}, {3, 2, 4.0}};
  const auto path = temp_path("triplets.txt");
  rbf::save_triplets(path, t);
  const auto back = rbf::load_triplets(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].user, 3u);
  EXPECT_EQ(back[1].value, 4.0);
  std::filesystem::remove(path);
}

TEST(TraceCsv, HeaderAndRows) {
  const std::vector<rbf::TraceRecord> trace{{1, 0.5, 2.0, 0.1, 3, 0.25}};
  std::ostringstream plain, with_ratio;
  rbf::write_trace_csv(plain, trace, false);
  rbf::write_trace_csv(with_ratio, trace, true);
  EXPECT_EQ(plain.str(), "iter,residual,objective,alpha,d\n1,0.5,2,0.10000000000000001,3\n");
  EXPECT_EQ(with_ratio.str(), "iter,residual,objective,alpha,d,ratio\n1,0.5,2,0.10000000000000001,3,0.25\n");
}

TEST(FormatDouble, LocaleIndependentDigits) {
  EXPECT_EQ(rbf::format_double(3.5355339059327378, 6), "3.53553");
  EXPECT_EQ(rbf::format_double(0.5), "0.5");
  EXPECT_EQ(rbf::format_double(-2.0), "-2");
}
