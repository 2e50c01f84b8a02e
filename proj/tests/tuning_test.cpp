#include <gtest/gtest.h>

#include <cmath>

#include "exact_binomial.hpp"
#include "fixtures.hpp"
#include "msmgraph/errors.hpp"
#include "msmgraph/tuning.hpp"

using namespace msmgraph;
using testdata::Big;

namespace {

double rel_err(double got, const Big& want) {
  const Big diff = boost::multiprecision::abs(Big(got) - want);
  return static_cast<double>(diff / want);
}

// p = 0.1 and the epsilon that maps to it.
const double kP = 0.1;
const double kEps = 1.0 - std::cos(0.1 * M_PI);

OutputEstimate point_estimate(double s) {
  OutputEstimate e;
  e.estimate_S = e.lower_S = e.upper_S = s;
  return e;
}

}  // namespace

TEST(Bound, SingleReplicateNoMismatch) {
  const double got = missing_edge_bound(50, 0, kP, 1);
  EXPECT_LT(rel_err(got, testdata::exact_bound(50, 0, Big("0.1"), 1)), 1e-10);
  EXPECT_NEAR(got, 0.99484622479268, 1e-13);
}

TEST(Bound, MatchesExactOverGrid) {
  for (std::size_t len : {10u, 30u, 50u, 100u, 400u}) {
    for (std::size_t d : {0u, 1u, 3u, 7u}) {
      for (double p : {0.02, 0.1, 0.25, 0.5}) {
        for (std::size_t q : {1u, 14u, 300u}) {
          const Big want = testdata::exact_bound(len, d, Big(p), q);
          if (want < Big("1e-300")) continue;
          ASSERT_LT(rel_err(missing_edge_bound(len, d, p, q), want), 1e-9)
              << len << " " << d << " " << p << " " << q;
        }
      }
    }
  }
}

TEST(Bound, LogFormSurvivesUnderflow) {
  const double lb = log_missing_edge_bound(200, 40, 0.05, 100000);
  EXPECT_TRUE(std::isfinite(lb));
  EXPECT_LT(lb, -745.0);
  EXPECT_EQ(missing_edge_bound(200, 40, 0.05, 100000), 0.0);
}

TEST(Bound, DegenerateProbabilities) {
  EXPECT_EQ(missing_edge_bound(20, 0, 0.0, 1), 0.0);
  EXPECT_EQ(missing_edge_bound(20, 3, 1.0, 5), 1.0);
  EXPECT_EQ(binomial_cdf(20, 20, 0.3), 1.0);
  EXPECT_NEAR(binomial_cdf(20, 3, 0.3),
              static_cast<double>(testdata::exact_cdf(20, 3, Big("0.3"))), 1e-14);
}

TEST(MinReplicates, FiftyBitsTwoMismatches) {
  EXPECT_EQ(min_replicates(50, 2, kP, 1e-6), 117u);
  EXPECT_EQ(testdata::exact_min_replicates(50, 2, Big("0.1"), Big("1e-6")), 117u);
  EXPECT_LE(missing_edge_bound(50, 2, kP, 117), 1e-6);
  EXPECT_GT(missing_edge_bound(50, 2, kP, 116), 1e-6);
}

TEST(MinReplicates, MatchesExactAndDecreasesWithBudget) {
  const std::vector<std::size_t> expected = {2674, 402, 117, 48, 25, 15, 10, 7};
  std::size_t previous = SIZE_MAX;
  for (std::size_t d = 0; d < expected.size(); ++d) {
    const auto q = min_replicates(50, d, kP, 1e-6);
    EXPECT_EQ(q, expected[d]) << d;
    EXPECT_EQ(q, testdata::exact_min_replicates(50, d, Big("0.1"), Big("1e-6"))) << d;
    EXPECT_LE(q, previous);
    previous = q;
  }
}

TEST(MinReplicates, TrivialAndInfeasible) {
  EXPECT_EQ(min_replicates(50, 2, kP, 1.0), 1u);
  EXPECT_EQ(min_replicates(50, 2, 0.0, 1e-9), 1u);
  EXPECT_EQ(min_replicates(50, 50, 0.3, 1e-9), 1u);
  EXPECT_THROW(min_replicates(50, 2, 1.0, 1e-6), InfeasibleError);
}

TEST(CollisionProb, AngleOverPi) {
  EXPECT_NEAR(collision_prob(kEps), 0.1, 1e-12);
  EXPECT_NEAR(collision_prob(0.0489), 0.1, 2e-4);
  EXPECT_EQ(collision_prob(0.0), 0.0);
  EXPECT_NEAR(collision_prob(1.0), 0.5, 1e-15);
  EXPECT_THROW(collision_prob(1.5), std::invalid_argument);
}

TEST(DefaultLength, TwiceCeilLog2) {
  EXPECT_EQ(default_length(2), 2u);
  EXPECT_EQ(default_length(3), 4u);
  EXPECT_EQ(default_length(4), 4u);
  EXPECT_EQ(default_length(5), 6u);
  EXPECT_EQ(default_length(20000), 30u);
  EXPECT_EQ(default_length(std::size_t{1} << 20), 40u);
  EXPECT_EQ(default_length((std::size_t{1} << 20) + 1), 42u);
}

// Q(d = 4) is exactly 25, which is not below the threshold, so d = 5 is the
// smallest qualifying budget at (50, 0.1, 1e-6).
TEST(SmallestMismatch, StrictThreshold) {
  EXPECT_EQ(min_replicates(50, 4, kP, 1e-6), 25u);
  EXPECT_EQ(smallest_mismatch(50, kP, 1e-6, 25.0), 5u);
  EXPECT_EQ(smallest_mismatch(50, kP, 1e-6, 26.0), 4u);
  EXPECT_EQ(smallest_mismatch(30, kP, 1e-3, 25.0), 2u);
  EXPECT_FALSE(smallest_mismatch(1, 0.5, 1e-9, 25.0).has_value());
}

TEST(AutoParams, PlantedFixtureShape) {
  const auto c = auto_params(20000, kEps, 1e-3, point_estimate(50000));
  EXPECT_EQ(c.params.length, 30u);
  EXPECT_EQ(c.params.mismatch, 2u);
  EXPECT_EQ(c.params.blocks, 4u);
  EXPECT_EQ(c.params.replicates, 14u);
  EXPECT_FALSE(c.cap_binding);
  EXPECT_FALSE(c.length_halved);
  EXPECT_LE(c.achieved_bound, 1e-3);
  EXPECT_EQ(c.gamma_replicates, testdata::exact_min_replicates(30, 2, Big(c.p), Big("1e-3")));
}

TEST(AutoParams, MillionPointsUseFortyBits) {
  const std::size_t n = std::size_t{1} << 20;
  const auto c = auto_params(n, kEps, 1e-6, point_estimate(1e9));
  EXPECT_EQ(c.params.length, 40u);
  const auto d = smallest_mismatch(40, c.p, 1e-6, 25.0);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(c.params.mismatch, *d);
  EXPECT_EQ(c.params.blocks, std::max<std::size_t>(2 * *d, 1));
}

TEST(AutoParams, CapBindsAndReportsAchievedBound) {
  // S = 0.5 n gives cap = ceil(max(15, 5)) = 15 against a requirement of 117.
  auto config = AutoConfig{};
  config.allow_halving = false;
  const auto est = point_estimate(500);
  const auto c = auto_params(1000, kEps, 1e-6,
                             est, config, ParamOverrides{50, 2, 4, std::nullopt});
  EXPECT_EQ(c.gamma_replicates, 117u);
  EXPECT_EQ(c.replicate_cap, 15u);
  EXPECT_TRUE(c.cap_binding);
  EXPECT_EQ(c.params.replicates, 15u);
  EXPECT_NEAR(c.achieved_bound, missing_edge_bound(50, 2, c.p, 15), 1e-15);
  EXPECT_GT(c.achieved_bound, 1e-6);
}

TEST(AutoParams, CapFloorIsFive) {
  ParamOverrides o;
  o.length = 50;
  o.mismatch = 0;
  const auto c = auto_params(1000, kEps, 1e-6, point_estimate(0), {}, o);
  EXPECT_EQ(c.replicate_cap, 5u);
  EXPECT_EQ(c.params.replicates, 5u);
  EXPECT_EQ(c.params.blocks, 1u);
}

TEST(AutoParams, SparseOutputHalvesLength) {
  const auto c = auto_params(20000, kEps, 1e-3, point_estimate(10));
  EXPECT_TRUE(c.length_halved);
  EXPECT_EQ(c.base_length, 30u);
  EXPECT_EQ(c.params.length, 15u);
  AutoConfig off;
  off.allow_halving = false;
  EXPECT_EQ(auto_params(20000, kEps, 1e-3, point_estimate(10), off).params.length, 30u);
}

TEST(AutoParams, UsesUpperLimitForHalving) {
  OutputEstimate e;
  e.estimate_S = 10;
  e.lower_S = 0;
  e.upper_S = 300;  // above 0.01 * 20000
  EXPECT_FALSE(auto_params(20000, kEps, 1e-3, e).length_halved);
}

TEST(AutoParams, OverridesAreKept) {
  const ParamOverrides o{64, 3, 9, 2};
  const auto c = auto_params(5000, kEps, 1e-6, point_estimate(1e6), {}, o);
  EXPECT_EQ(c.params.length, 64u);
  EXPECT_EQ(c.params.mismatch, 3u);
  EXPECT_EQ(c.params.blocks, 9u);
  EXPECT_EQ(c.params.replicates, 2u);
  EXPECT_FALSE(c.cap_binding);
}

TEST(AutoParams, RejectsBadInput) {
  EXPECT_THROW(auto_params(1, kEps, 1e-3, point_estimate(0)), std::invalid_argument);
  EXPECT_THROW(auto_params(100, 1.5, 1e-3, point_estimate(0)), std::invalid_argument);
  EXPECT_THROW(auto_params(100, kEps, 0.0, point_estimate(0)), std::invalid_argument);
  EXPECT_THROW(auto_params(100, kEps, 1e-3, point_estimate(0), {}, {8, 4, 4, 1}),
               InfeasibleError);
}

TEST(LshOnly, LongestFeasibleLength) {
  for (const char* g : {"1e-6", "1e-3"}) {
    const double gamma = std::stod(g);
    const auto c = lsh_only_params(kEps, gamma);
    // Exact scan over lengths.
    std::size_t best = 0;
    for (std::size_t len = 1; len <= 128; ++len) {
      if (testdata::exact_bound(len, 0, Big(c.p), 300) <= Big(g)) best = len;
    }
    EXPECT_EQ(c.params.length, best) << g;
    EXPECT_EQ(c.params.mismatch, 0u);
    EXPECT_EQ(c.params.blocks, 1u);
    EXPECT_EQ(c.params.replicates, 300u);
    EXPECT_LE(c.achieved_bound, gamma);
  }
  EXPECT_EQ(lsh_only_params(kEps, 1e-6).params.length, 29u);
  EXPECT_EQ(lsh_only_params(kEps, 1e-3).params.length, 35u);
}

TEST(LshOnly, InfeasibleBudget) {
  EXPECT_THROW(lsh_only_params(1.0, 1e-300, {1, 128}), InfeasibleError);
}

TEST(Params, Validate) {
  MsmParams p{0.1, 1e-6, 16, 2, 4, 1, 0};
  EXPECT_NO_THROW(p.validate());
  p.mismatch = 4;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {0.1, 1e-6, 16, 2, 17, 1, 0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {0.1, 1e-6, 16, 2, 4, 0, 0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {2.5, 1e-6, 16, 2, 4, 1, 0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Estimate, ExhaustiveOnSmallData) {
  const auto data = testdata::planted_clusters({5, 8, 20, 16, 0.02}, 3);
  const double eps = 0.05;
  std::size_t truth = 0;
  for (std::size_t i = 0; i < data.count(); ++i)
    for (std::size_t j = i + 1; j < data.count(); ++j)
      truth += cosine_distance(data.row(i), data.row(j)) <= eps;
  const auto e = estimate_output_size(data, eps, 10000, 1);
  EXPECT_TRUE(e.exhaustive);
  EXPECT_EQ(e.hits, truth);
  EXPECT_DOUBLE_EQ(e.estimate_S, static_cast<double>(truth));
  EXPECT_DOUBLE_EQ(e.lower_S, e.upper_S);
}

TEST(Estimate, SampledIntervalCoversTruth) {
  const auto data = testdata::planted_clusters({20, 30, 600, 16, 0.02}, 4);
  const double eps = 0.05;
  std::size_t truth = 0;
  for (std::size_t i = 0; i < data.count(); ++i)
    for (std::size_t j = i + 1; j < data.count(); ++j)
      truth += cosine_distance(data.row(i), data.row(j)) <= eps;
  std::size_t covered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = estimate_output_size(data, eps, 5000, seed);
    EXPECT_FALSE(e.exhaustive);
    EXPECT_EQ(e.sampled_pairs, 5000u);
    EXPECT_LE(e.lower_S, e.estimate_S);
    EXPECT_GE(e.upper_S, e.estimate_S);
    covered += e.lower_S <= truth && truth <= e.upper_S;
  }
  EXPECT_GE(covered, 16u);
  EXPECT_EQ(estimate_output_size(data, eps, 5000, 9).hits,
            estimate_output_size(data, eps, 5000, 9).hits);
}
