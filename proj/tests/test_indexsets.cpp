#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "lzcross/indexsets.hpp"

using namespace lzcross;

namespace {

std::vector<FrequencyIndex> brute_cross(long n, const std::vector<double>& gamma, long limit) {
  // Oracle: test every k in [-limit, limit]^m against sum_j g_j * bitwidth(|k_j|) < n.
  const std::size_t m = gamma.size();
  std::vector<FrequencyIndex> out;
  FrequencyIndex k(m, -limit);
  for (;;) {
    double dot = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      long a = std::abs(k[j]), w = 0;
      while (a) { ++w; a >>= 1; }
      dot += gamma[j] * static_cast<double>(w);
    }
    if (dot < static_cast<double>(n) - 1e-12) out.push_back(k);
    std::size_t j = m;
    while (j > 0) {
      --j;
      if (k[j] < limit) { ++k[j]; break; }
      k[j] = -limit;
      if (j == 0) return out;
    }
  }
}

}  // namespace

TEST(RhoBlock, Examples) {
  EXPECT_EQ(rho_block(MultiIndex{1}), (std::vector<FrequencyIndex>{FrequencyIndex{-1}, FrequencyIndex{1}}));
  EXPECT_EQ(rho_block(MultiIndex{0}), (std::vector<FrequencyIndex>{FrequencyIndex{0}}));
  const auto b = rho_block(MultiIndex{2, 1});
  EXPECT_EQ(b.size(), 8u);
  for (const auto& k : b) {
    EXPECT_TRUE(std::abs(k[0]) == 2 || std::abs(k[0]) == 3);
    EXPECT_EQ(std::abs(k[1]), 1);
  }
  EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
  EXPECT_EQ(rho_axis_size(3), 8);
  EXPECT_EQ(rho_axis_size(0), 1);
}

TEST(RhoBlock, BlockOfInvertsRho) {
  for (std::int64_t s0 = 0; s0 < 5; ++s0)
    for (std::int64_t s1 = 0; s1 < 4; ++s1)
      for (const auto& k : rho_block(MultiIndex{s0, s1})) EXPECT_EQ(block_of(k), (MultiIndex{s0, s1}));
}

TEST(RhoBlock, PartitionOfBox) {
  // Every k with |k_j| < 2^S lies in exactly one block s in [0,S]^m.
  const long S = 4;
  std::map<FrequencyIndex, int> hits;
  for (std::int64_t s0 = 0; s0 <= S; ++s0)
    for (std::int64_t s1 = 0; s1 <= S; ++s1)
      for (const auto& k : rho_block(MultiIndex{s0, s1})) ++hits[k];
  const long lim = (1 << S) - 1;
  EXPECT_EQ(hits.size(), static_cast<std::size_t>((2 * lim + 1) * (2 * lim + 1)));
  for (const auto& [k, c] : hits) EXPECT_EQ(c, 1) << k.to_string();
}

TEST(CrossLayers, Examples) {
  EXPECT_EQ(cross_layers(2, Anisotropy::uniform(2)),
            (std::vector<MultiIndex>{MultiIndex{0, 0}, MultiIndex{0, 1}, MultiIndex{1, 0}}));
  EXPECT_TRUE(cross_layers(0, Anisotropy::uniform(3)).empty());
  EXPECT_EQ(cross_layers(1, Anisotropy::uniform(1)), (std::vector<MultiIndex>{MultiIndex{0}}));
  EXPECT_TRUE(cross_layers(-1, Anisotropy::uniform(1)).empty());
}

TEST(CrossLayers, RationalAnisotropyIsExact) {
  // gamma = (1/3, 2/3), n = 1: s0 + 2 s1 < 3.
  const Anisotropy g{Rational(1, 3), Rational(2, 3)};
  const auto layers = cross_layers(1, g);
  std::vector<MultiIndex> expect;
  for (std::int64_t a = 0; a < 3; ++a)
    for (std::int64_t b = 0; b < 2; ++b)
      if (a + 2 * b < 3) expect.push_back(MultiIndex{a, b});
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(layers, expect);
}

TEST(HyperbolicCross, Examples) {
  const auto q = hyperbolic_cross(2, Anisotropy::uniform(2));
  EXPECT_EQ(q, (std::vector<FrequencyIndex>{FrequencyIndex{-1, 0}, FrequencyIndex{0, -1}, FrequencyIndex{0, 0},
                                            FrequencyIndex{0, 1}, FrequencyIndex{1, 0}}));
  EXPECT_EQ(hyperbolic_cross(3, Anisotropy::uniform(1)).size(), 7u);
  EXPECT_TRUE(hyperbolic_cross(0, Anisotropy::uniform(2)).empty());
}

TEST(HyperbolicCross, OneDimensionalCardinality) {
  for (long n = 1; n <= 12; ++n) {
    EXPECT_EQ(cross_cardinality(n, Anisotropy::uniform(1)), (1L << n) - 1);
    EXPECT_EQ(static_cast<long>(hyperbolic_cross(n, Anisotropy::uniform(1)).size()), (1L << n) - 1);
  }
}

TEST(HyperbolicCross, MatchesBruteForce) {
  const std::vector<std::pair<Anisotropy, std::vector<double>>> cases = {
      {Anisotropy::uniform(2), {1.0, 1.0}},
      {Anisotropy{Rational(1), Rational(3, 2)}, {1.0, 1.5}},
      {Anisotropy{Rational(1, 2), Rational(2, 3)}, {0.5, 2.0 / 3.0}},
  };
  for (const auto& [g, gd] : cases)
    for (long n = 0; n <= 5; ++n) {
      const auto q = hyperbolic_cross(n, g);
      const auto oracle = brute_cross(n, gd, 1 << 11);
      EXPECT_EQ(q, oracle) << "n=" << n;
      EXPECT_EQ(cross_cardinality(n, g), static_cast<std::int64_t>(q.size()));
      for (const auto& k : q) EXPECT_TRUE(in_cross(k, n, g));
    }
}

TEST(HyperbolicCross, Monotone) {
  const Anisotropy g{Rational(1), Rational(4, 3)};
  std::vector<FrequencyIndex> prev;
  for (long twice = 0; twice <= 14; ++twice) {
    const auto q = hyperbolic_cross(Rational(twice, 2), g);
    EXPECT_TRUE(std::includes(q.begin(), q.end(), prev.begin(), prev.end()));
    prev = q;
  }
}

TEST(HyperbolicCross, NoDuplicates) {
  const auto q = hyperbolic_cross(6, Anisotropy::uniform(3));
  EXPECT_EQ(std::adjacent_find(q.begin(), q.end()), q.end());
}

TEST(LayerExact, Examples) {
  EXPECT_EQ(layer_exact(2, Anisotropy::uniform(2)),
            (std::vector<MultiIndex>{MultiIndex{0, 2}, MultiIndex{1, 1}, MultiIndex{2, 0}}));
  EXPECT_TRUE(layer_exact(Rational(1, 2), Anisotropy::uniform(2)).empty());
  EXPECT_EQ(layer_exact(0, Anisotropy::uniform(3)), (std::vector<MultiIndex>{MultiIndex{0, 0, 0}}));
}

TEST(LayerExact, RationalWeights) {
  const Anisotropy g{Rational(1, 2), Rational(3, 4)};
  for (long twice = 0; twice <= 12; ++twice) {
    const Rational n(twice, 2);
    const auto layer = layer_exact(n, g);
    std::vector<MultiIndex> oracle;
    for (std::int64_t a = 0; a <= 20; ++a)
      for (std::int64_t b = 0; b <= 20; ++b)
        if (2 * a + 3 * b == 2 * twice) oracle.push_back(MultiIndex{a, b});
    EXPECT_EQ(layer, oracle) << n.to_string();
  }
}

TEST(LayerAboveTruncated, Examples) {
  const auto g = Anisotropy::uniform(2);
  const auto y = layer_above_truncated(1, g, MultiIndex{2, 2});
  EXPECT_EQ(y.size(), 8u);
  EXPECT_EQ(std::find(y.begin(), y.end(), MultiIndex{0, 0}), y.end());
  EXPECT_EQ(layer_above_truncated(0, g, MultiIndex{1, 1}).size(), 4u);
}

TEST(LayerAboveTruncated, RejectsBoxBelowGenerators) {
  // n=5 with box (2,2) violates box_j >= ceil(n/gamma_j).
  EXPECT_THROW(layer_above_truncated(5, Anisotropy::uniform(2), MultiIndex{2, 2}), std::invalid_argument);
  EXPECT_NO_THROW(layer_above_truncated(5, Anisotropy::uniform(2), MultiIndex{5, 5}));
}

TEST(LayerAboveTruncated, ContainsExactLayer) {
  const Anisotropy g{Rational(1), Rational(1, 2)};
  for (long n = 0; n <= 6; ++n) {
    const MultiIndex box{n + 2, 2 * n + 1};
    const auto y = layer_above_truncated(n, g, box);
    for (const auto& s : layer_exact(n, g)) EXPECT_NE(std::find(y.begin(), y.end(), s), y.end());
    for (const auto& s : y) EXPECT_GE(g.dot(s), Rational(n));
  }
}

TEST(Anisotropy, RejectsNonPositive) {
  EXPECT_THROW(Anisotropy({Rational(0)}), std::invalid_argument);
  EXPECT_THROW(Anisotropy({Rational(-1, 2)}), std::invalid_argument);
  EXPECT_THROW(Anisotropy(std::vector<Rational>{}), std::invalid_argument);
}

TEST(Anisotropy, ScaledDotIsExact) {
  const Anisotropy g{Rational(1, 3), Rational(1, 6), Rational(5, 4)};
  EXPECT_EQ(g.common_denominator(), 12);
  EXPECT_EQ(g.scaled_dot(MultiIndex{3, 6, 4}), 3 * 4 + 6 * 2 + 4 * 15);
  EXPECT_EQ(g.dot(MultiIndex{3, 6, 4}), Rational(7));
  EXPECT_THROW(g.scaled_dot(MultiIndex{1, 2}), std::invalid_argument);
}

TEST(Indexsets, RandomCrossMembershipAgreesWithLayers) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::int64_t> coord(-300, 300);
  const Anisotropy g{Rational(2, 3), Rational(1)};
  for (int t = 0; t < 500; ++t) {
    const FrequencyIndex k{coord(rng), coord(rng)};
    const Rational n(static_cast<std::int64_t>(t % 13));
    EXPECT_EQ(in_cross(k, n, g), g.dot(block_of(k)) < n);
  }
}
