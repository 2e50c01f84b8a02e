#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "msmgraph/errors.hpp"
#include "msmgraph/lsh.hpp"

using namespace msmgraph;

TEST(ProjectionColumn, DeterministicAndDistinct) {
  std::vector<double> a(64), b(64), c(64), d(64);
  projection_column(1, 1, 0, a);
  projection_column(1, 1, 0, b);
  projection_column(1, 2, 0, c);
  projection_column(1, 1, 1, d);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a, d);
}

TEST(ProjectionColumn, StandardNormalMoments) {
  std::vector<double> col(101);
  double sum = 0, sq = 0, fourth = 0;
  std::size_t count = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    projection_column(42, 3, t, col);
    for (double x : col) {
      sum += x;
      sq += x * x;
      fourth += x * x * x * x;
      ++count;
    }
  }
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  EXPECT_NEAR(mean, 0.0, 5 * std::sqrt(1.0 / count));
  EXPECT_NEAR(var, 1.0, 5 * std::sqrt(2.0 / count));
  EXPECT_NEAR(fourth / count, 3.0, 0.1);
}

TEST(Project, BitsAreSignsOfColumnDots) {
  const auto data = testdata::planted_clusters({3, 4, 5, 7, 0.3}, 8);
  const ProjectionSpec spec{150, 77, 4};
  const auto pool = project(data, spec);
  std::vector<double> col(7);
  for (std::size_t t = 0; t < 150; ++t) {
    projection_column(77, 4, t, col);
    for (std::size_t i = 0; i < data.count(); ++i) {
      double s = 0;
      for (std::size_t k = 0; k < 7; ++k) s += col[k] * data.row(i)[k];
      ASSERT_EQ(pool.bit(i, t), s > 0) << i << " " << t;
    }
  }
}

TEST(Project, ThreadCountDoesNotMatter) {
  const auto data = testdata::planted_clusters({10, 200, 500, 16, 0.1}, 2);
  const ProjectionSpec spec{200, 5, 1};
  EXPECT_EQ(project(data, spec, 1), project(data, spec, 4));
}

TEST(Project, ScaleInvariant) {
  auto data = testdata::planted_clusters({2, 10, 0, 12, 0.2}, 6);
  auto scaled = data;
  for (std::size_t i = 0; i < scaled.count(); ++i)
    for (auto& x : scaled.mutable_row(i)) x *= 8.0f;
  const ProjectionSpec spec{96, 1, 1};
  EXPECT_EQ(project(data, spec), project(scaled, spec));
}

TEST(Project, RejectsZeroRowsAndBadLength) {
  VectorDataset data(3, 4);
  data.mutable_row(0)[0] = 1;
  data.mutable_row(2)[1] = 1;
  try {
    project(data, {16, 0, 1});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
  data.mutable_row(1)[3] = 1;
  EXPECT_THROW(project(data, {0, 0, 1}), std::invalid_argument);
  EXPECT_NO_THROW(project(data, {16, 0, 1}));
}

TEST(Project, MismatchRateIsAngleOverPi) {
  const double theta = 0.2 * std::numbers::pi;
  const auto data = testdata::pair_at_angle(theta, 5);
  const std::size_t len = 40000;
  const auto pool = project(data, {len, 9, 1});
  const double p = theta / std::numbers::pi;
  const double frac = static_cast<double>(pool.hamming_distance(0, 1)) / len;
  EXPECT_NEAR(frac, p, 4 * std::sqrt(p * (1 - p) / len));
}

TEST(Normalize, CentersAndScales) {
  const auto data = testdata::planted_clusters({4, 25, 50, 9, 0.2}, 1);
  const auto out = center_and_normalize(data);
  std::vector<double> mean(9, 0);
  for (std::size_t i = 0; i < out.count(); ++i) {
    EXPECT_NEAR(norm(out.row(i)), 1.0, 1e-6);
    for (std::size_t k = 0; k < 9; ++k) mean[k] += out.row(i)[k];
  }
  // Centering happens before scaling, so the output mean is small but not zero.
  for (double m : mean) EXPECT_LT(std::abs(m / out.count()), 0.5);
}

TEST(Normalize, RowAtMeanIsAnError) {
  VectorDataset data(3, 2, {1, 0, 0, 1, 0.5f, 0.5f});
  // Row 2 equals the column mean.
  try {
    center_and_normalize(data);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Geometry, CosineAndAngle) {
  const auto data = testdata::pair_at_angle(std::numbers::pi / 3);
  EXPECT_NEAR(cosine_distance(data.row(0), data.row(1)), 0.5, 1e-7);
  EXPECT_NEAR(angle(data.row(0), data.row(1)), std::numbers::pi / 3, 1e-7);
  EXPECT_EQ(cosine_distance(data.row(0), data.row(0)), 0.0);
  const std::vector<float> x{1, 0}, y{-1, 0}, z{0, 0};
  EXPECT_EQ(cosine_distance(x, y), 2.0);
  EXPECT_THROW(cosine_distance(x, z), DataError);
}

TEST(Geometry, RadiusConversions) {
  EXPECT_DOUBLE_EQ(euclidean_radius_from_cosine(0.5), 1.0);
  EXPECT_DOUBLE_EQ(cosine_radius_from_euclidean(1.0), 0.5);
  // On unit vectors |x - y|^2 = 2 (1 - cos).
  const auto data = testdata::pair_at_angle(0.7);
  double sq = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double diff = data.row(0)[k] - data.row(1)[k];
    sq += diff * diff;
  }
  EXPECT_NEAR(cosine_radius_from_euclidean(std::sqrt(sq)),
              cosine_distance(data.row(0), data.row(1)), 1e-7);
}

TEST(Dataset, PrefixAndValidation) {
  VectorDataset data(4, 2, {1, 2, 3, 4, 5, 6, 7, 8});
  const auto p = data.prefix(2);
  EXPECT_EQ(p.count(), 2u);
  EXPECT_EQ(p.values(), (std::vector<float>{1, 2, 3, 4}));
  EXPECT_EQ(data.prefix(10), data);
  EXPECT_THROW(VectorDataset(2, 2, {1, 2, 3}), std::invalid_argument);
}
