#include <gtest/gtest.h>

#include "desctrack/errors.hpp"
#include "desctrack/matching.hpp"
#include "desctrack/random.hpp"
#include "oracles.hpp"

using namespace desctrack;

namespace {

DescriptorSet random_binary(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Keypoint> kps(n);
  std::vector<BinaryDescriptor> d(n);
  for (auto& x : d) {
    for (auto& w : x.words) w = rng();
  }
  return DescriptorSet::make_binary(kps, d);
}

DescriptorSet random_float(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Keypoint> kps(n);
  std::vector<FloatDescriptor> d(n);
  for (auto& x : d) {
    double norm = 0;
    for (auto& v : x.values) {
      v = static_cast<float>(rng.uniform());
      norm += double(v) * v;
    }
    for (auto& v : x.values) v = static_cast<float>(v / std::sqrt(norm));
  }
  return DescriptorSet::make_float(kps, d);
}

DescriptorSet binary_from_words(std::vector<std::uint64_t> first_words) {
  std::vector<BinaryDescriptor> d;
  for (const auto w : first_words) d.push_back(BinaryDescriptor{{w, 0, 0, 0}});
  return DescriptorSet::make_binary(std::vector<Keypoint>(d.size()), d);
}

}  // namespace

TEST(Distances, HammingAndL2) {
  BinaryDescriptor a, b;
  EXPECT_EQ(hamming_distance(a, b), 0);
  b.words = {~0ull, ~0ull, ~0ull, ~0ull};
  EXPECT_EQ(hamming_distance(a, b), 256);
  b.words = {0b1011, 0, 0, 1ull << 63};
  EXPECT_EQ(hamming_distance(a, b), 4);
  const std::vector<std::uint64_t> x = {1, 2}, y = {1};
  EXPECT_THROW(hamming_distance(x, y), std::invalid_argument);

  FloatDescriptor f, g;
  f.values[0] = 3.0f;
  g.values[1] = 4.0f;
  EXPECT_DOUBLE_EQ(l2_distance(f, g), 5.0);
  const std::vector<float> p = {1, 2}, q = {1};
  EXPECT_THROW(l2_distance(p, q), std::invalid_argument);
}

TEST(RatioTest, Rule) {
  MatcherConfig cfg;
  EXPECT_FALSE(is_ambiguous(10, 20.0, cfg));
  EXPECT_TRUE(is_ambiguous(16, 20.0, cfg));   // exactly rho
  EXPECT_TRUE(is_ambiguous(19, 20.0, cfg));
  EXPECT_TRUE(is_ambiguous(0, 0.0, cfg));     // duplicate candidates
  EXPECT_FALSE(is_ambiguous(0, 3.0, cfg));
  EXPECT_FALSE(is_ambiguous(5, std::nullopt, cfg));
  cfg.single_candidate_unambiguous = false;
  EXPECT_TRUE(is_ambiguous(5, std::nullopt, cfg));
  cfg.rho = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.rho = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(BruteForce, SmallHandCase) {
  const auto q = binary_from_words({0b0000, 0b1111});
  const auto t = binary_from_words({0b0001, 0b0111, 0b1111});
  const auto m = brute_force_match(q, t);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].train_idx, 0u);
  EXPECT_EQ(m[0].best_distance, 1);
  EXPECT_EQ(*m[0].second_distance, 3);
  EXPECT_FALSE(m[0].ambiguous);
  EXPECT_EQ(m[1].train_idx, 2u);
  EXPECT_EQ(m[1].best_distance, 0);
  EXPECT_EQ(*m[1].second_distance, 1);
}

TEST(BruteForce, TiesGoToLowestTrainIndex) {
  const auto q = binary_from_words({0b0});
  const auto t = binary_from_words({0b10, 0b01});
  const auto m = brute_force_match(q, t);
  EXPECT_EQ(m[0].train_idx, 0u);
  EXPECT_TRUE(m[0].ambiguous);
}

TEST(BruteForce, EdgeCases) {
  const auto q = binary_from_words({0b0, 0b1});
  EXPECT_TRUE(brute_force_match(q, binary_from_words({})).empty());
  const auto single = brute_force_match(q, binary_from_words({0b11}));
  ASSERT_EQ(single.size(), 2u);
  EXPECT_FALSE(single[0].second_distance.has_value());
  EXPECT_FALSE(single[0].ambiguous);
  EXPECT_THROW(brute_force_match(q, random_float(3, 1)), std::invalid_argument);
}

TEST(BruteForce, CrossCheckKeepsMutualPairs) {
  const auto q = binary_from_words({0b0000, 0b0001, 0b1111});
  const auto t = binary_from_words({0b0000, 0b1110});
  MatcherConfig cfg;
  cfg.cross_check = true;
  const auto m = brute_force_match(q, t, cfg);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].query_idx, 0u);
  EXPECT_EQ(m[1].query_idx, 2u);
  EXPECT_EQ(m[1].train_idx, 1u);
}

TEST(BruteForce, AgreesWithNaiveOracle) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (const bool cross : {false, true}) {
      MatcherConfig cfg;
      cfg.cross_check = cross;
      const auto qb = random_binary(60, seed), tb = random_binary(70, seed + 100);
      EXPECT_EQ(brute_force_match(qb, tb, cfg), oracle::naive_match(qb, tb, cfg));
      const auto qf = random_float(60, seed), tf = random_float(70, seed + 100);
      const auto got = brute_force_match(qf, tf, cfg);
      const auto want = oracle::naive_match(qf, tf, cfg);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].query_idx, want[i].query_idx);
        EXPECT_EQ(got[i].train_idx, want[i].train_idx);
        EXPECT_NEAR(got[i].best_distance, want[i].best_distance, 1e-9);
        EXPECT_NEAR(*got[i].second_distance, *want[i].second_distance, 1e-9);
        EXPECT_EQ(got[i].ambiguous, want[i].ambiguous);
      }
    }
  }
}

TEST(MatchingProperty, BestNeverExceedsSecond) {
  const auto q = random_binary(100, 8), t = random_binary(100, 9);
  for (const auto& m : brute_force_match(q, t)) {
    ASSERT_TRUE(m.second_distance.has_value());
    EXPECT_LE(m.best_distance, *m.second_distance);
  }
}

TEST(MatchingProperty, SelfMatchIsIdentity) {
  const auto q = random_binary(50, 10);
  for (const auto& m : brute_force_match(q, q)) {
    EXPECT_EQ(m.train_idx, m.query_idx);
    EXPECT_EQ(m.best_distance, 0);
  }
}

TEST(Filter, DropsAmbiguousKeepsOrder) {
  std::vector<MatchRecord> m(4);
  for (std::size_t i = 0; i < 4; ++i) {
    m[i].query_idx = i;
    m[i].ambiguous = i % 2 == 1;
  }
  const auto f = filter_unambiguous(m);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].query_idx, 0u);
  EXPECT_EQ(f[1].query_idx, 2u);
}
