#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lzcross/norms.hpp"

using namespace lzcross;

namespace {

GridFunction real_grid(std::vector<std::size_t> shape, const std::vector<double>& v) {
  GridFunction g(std::move(shape));
  for (std::size_t i = 0; i < v.size(); ++i) g.samples[i] = v[i];
  return g;
}

// Closed form of int_0^a t^{tau/p - 1} dt raised to 1/tau.
double indicator_norm(double a, double p, double tau) { return std::pow(p / tau, 1.0 / tau) * std::pow(a, 1.0 / p); }

std::vector<double> indicator_profile(std::size_t cells, std::size_t ones) {
  std::vector<double> v(cells, 0.0);
  for (std::size_t i = 0; i < ones; ++i) v[i] = 1.0;
  return v;
}

}  // namespace

TEST(Rearrange, Examples) {
  auto r = rearrange_axis(real_grid({4}, {1, 3, 2, 0}), 0);
  EXPECT_EQ(r.values, (std::vector<double>{3, 2, 1, 0}));
  auto c = rearrange_axis(real_grid({2, 2}, {-5, -5, -5, -5}), 1);
  EXPECT_EQ(c.values, (std::vector<double>{5, 5, 5, 5}));
  auto two = rearrange_axis(real_grid({2, 2}, {0, 4, 3, 1}), 0);
  EXPECT_EQ(two.values, (std::vector<double>{3, 4, 0, 1}));
  EXPECT_THROW(rearrange_axis(real_grid({2, 2}, {0, 4, 3, 1}), 2), std::out_of_range);
}

TEST(Rearrange, UsesMagnitudeOfComplexSamples) {
  GridFunction g({2});
  g.samples = {{0.0, 1.0}, {-3.0, 4.0}};
  EXPECT_EQ(iterated_rearrangement(g).values, (std::vector<double>{5.0, 1.0}));
}

TEST(Rearrange, SeparableIsOuterProductOfSortedFactors) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> g(4), h(4), v(16);
    for (auto& x : g) x = u(rng);
    for (auto& x : h) x = u(rng);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v[i * 4 + j] = g[i] * h[j];
    auto gs = g, hs = h;
    std::sort(gs.rbegin(), gs.rend());
    std::sort(hs.rbegin(), hs.rend());
    const auto prof = iterated_rearrangement(real_grid({4, 4}, v));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(prof.values[i * 4 + j], gs[i] * hs[j]);
  }
}

TEST(Rearrange, OneDimensionalIteratedEqualsSingleAxis) {
  const auto g = real_grid({8}, {0.1, -2, 3, 0, 5, 1, -1, 2});
  EXPECT_EQ(iterated_rearrangement(g).values, rearrange_axis(g, 0).values);
}

TEST(LzScalarNorm, ConstantLebesgue) {
  for (double p : {1.5, 2.0, 4.0}) {
    const std::vector<double> ones(64, 1.0);
    EXPECT_NEAR(lz_scalar_norm(ones, {p, 0.0, p}), 1.0, 1e-12);
  }
}

TEST(LzScalarNorm, ConstantWithTauOne) {
  const std::vector<double> c(32, 3.0);
  EXPECT_NEAR(lz_scalar_norm(c, {2.0, 0.0, 1.0}), 6.0, 1e-10);
}

TEST(LzScalarNorm, IndicatorFundamentalFunction) {
  for (auto [p, tau] : {std::pair{2.0, 2.0}, std::pair{1.5, 3.0}, std::pair{3.0, 1.5}})
    for (int e = 1; e <= 10; ++e) {
      const std::size_t cells = 1024;
      const auto prof = indicator_profile(cells, cells >> e);
      const double a = std::ldexp(1.0, -e);
      EXPECT_NEAR(lz_scalar_norm(prof, {p, 0.0, tau}) / indicator_norm(a, p, tau), 1.0, 1e-8)
          << "p=" << p << " tau=" << tau << " a=2^-" << e;
    }
}

TEST(LzScalarNorm, LogWeightedFundamentalFunctionWindow) {
  for (double alpha : {-0.5, 1.0}) {
    double lo = 1e300, hi = 0.0;
    for (int e = 1; e <= 10; ++e) {
      const auto prof = indicator_profile(1024, 1024 >> e);
      const double a = std::ldexp(1.0, -e);
      const double ratio = lz_scalar_norm(prof, {2.0, alpha, 2.0}) /
                           (std::pow(a, 0.5) * std::pow(1.0 + std::abs(std::log2(a)), alpha));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    EXPECT_LT(hi / lo, 3.0) << "alpha=" << alpha;
  }
}

TEST(LzScalarNorm, CellWeightsSumToWholeIntegral) {
  // alpha = 0: int_0^1 t^{tau/p - 1} dt = p / tau.
  const auto w = cell_weights(256, {1.5, 0.0, 3.0});
  double total = 0.0;
  for (double x : w) total += x;
  EXPECT_NEAR(total, 0.5, 1e-12);
}

TEST(LzScalarNorm, CellWeightsMatchAdaptiveReference) {
  // alpha != 0: compare the first cells to a fine trapezoid-in-u reference.
  const ScalarSpaceParams prm{2.0, 1.0, 2.0};
  const auto w = cell_weights(16, prm);
  for (std::size_t i = 1; i < 4; ++i) {
    const double lo = std::log2(16.0 / (i + 1)), hi = std::log2(16.0 / i);
    const int steps = 200000;
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double u = lo + (hi - lo) * k / steps;
      const double f = (1.0 + u) * (1.0 + u) * std::exp2(-u) * std::log(2.0);
      acc += (k == 0 || k == steps ? 0.5 : 1.0) * f;
    }
    acc *= (hi - lo) / steps;
    EXPECT_NEAR(w[i], acc, 1e-9 * acc);
  }
}

TEST(AnisotropicNorm, ConstantIsOne) {
  GridFunction g({8, 16});
  for (auto& z : g.samples) z = 1.0;
  const auto prm = MixedSpaceParams{{{1.5, 0.0, 1.5}, {3.0, 0.0, 3.0}}};
  EXPECT_NEAR(anisotropic_norm(g, prm), 1.0, 1e-12);
}

TEST(AnisotropicNorm, SeparableFactorizes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> g(8), h(8), v(64);
  for (auto& x : g) x = u(rng);
  for (auto& x : h) x = u(rng);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) v[i * 8 + j] = g[i] * h[j];
  const ScalarSpaceParams a{1.5, -0.5, 3.0}, b{2.5, 1.0, 2.0};
  const double lhs = anisotropic_norm(real_grid({8, 8}, v), MixedSpaceParams{{a, b}});
  const double ng = anisotropic_norm(real_grid({8}, g), MixedSpaceParams{{a}});
  const double nh = anisotropic_norm(real_grid({8}, h), MixedSpaceParams{{b}});
  EXPECT_NEAR(lhs, ng * nh, 1e-12 * lhs);
}

TEST(AnisotropicNorm, L2CoincidesWithRootMeanSquare) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01;
  GridFunction g({16, 32});
  double ms = 0.0;
  for (auto& z : g.samples) {
    z = {n01(rng), n01(rng)};
    ms += std::norm(z);
  }
  ms /= static_cast<double>(g.volume());
  const auto l2 = MixedSpaceParams::uniform(2, {2.0, 0.0, 2.0});
  EXPECT_NEAR(anisotropic_norm(g, l2), std::sqrt(ms), 1e-10 * std::sqrt(ms));
}

TEST(AnisotropicNorm, HomogeneityAndMonotonicity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GridFunction f({8, 8}), g({8, 8});
  for (std::size_t i = 0; i < f.volume(); ++i) {
    f.samples[i] = u(rng);
    g.samples[i] = f.samples[i].real() + u(rng);
  }
  const auto prm = MixedSpaceParams{{{1.5, 0.5, 2.0}, {3.0, -0.25, 1.5}}};
  const double nf = anisotropic_norm(f, prm);
  GridFunction cf = f;
  for (auto& z : cf.samples) z *= std::complex<double>(0.0, -2.5);
  EXPECT_NEAR(anisotropic_norm(cf, prm), 2.5 * nf, 1e-12 * nf);
  EXPECT_LE(nf, anisotropic_norm(g, prm));
}

TEST(AnisotropicNorm, GridRefinementIsStable) {
  // Bandlimited f(x,y) = cos(2 pi x) (1 + 0.5 sin(4 pi y)).
  auto sample = [](std::size_t n) {
    GridFunction g({n, n});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
        g.samples[i * n + j] = std::cos(2 * M_PI * x) * (1.0 + 0.5 * std::sin(4 * M_PI * y));
      }
    return g;
  };
  const auto prm = MixedSpaceParams{{{1.5, -0.5, 3.0}, {2.0, 1.0, 2.0}}};
  const double coarse = anisotropic_norm(sample(64), prm);
  const double fine = anisotropic_norm(sample(128), prm);
  EXPECT_LT(std::abs(fine - coarse) / fine, 0.01);
}

TEST(AnisotropicNorm, RejectsMismatchedParameters) {
  GridFunction g({4, 4});
  EXPECT_THROW(anisotropic_norm(g, MixedSpaceParams::uniform(1, {2.0, 0.0, 2.0})), std::invalid_argument);
  EXPECT_THROW(anisotropic_norm(g, MixedSpaceParams::uniform(2, {1.0, 0.0, 2.0})), std::invalid_argument);
  EXPECT_THROW(anisotropic_norm(g, MixedSpaceParams::uniform(2, {2.0, 0.0, kInfinity})), std::invalid_argument);
}

TEST(GridFunction, RejectsBadShapes) {
  EXPECT_THROW(GridFunction({3}), std::invalid_argument);
  EXPECT_THROW(GridFunction({1}), std::invalid_argument);
  EXPECT_THROW(GridFunction(std::vector<std::size_t>{}), std::invalid_argument);
  EXPECT_THROW(GridFunction({4}, std::vector<std::complex<double>>(3)), std::invalid_argument);
}

TEST(MixedSequenceNorm, Examples) {
  std::map<MultiIndex, double> single{{MultiIndex{3, 1}, 2.5}};
  EXPECT_DOUBLE_EQ(mixed_sequence_norm(single, {{0.5, kInfinity}}), 2.5);
  std::map<MultiIndex, double> three{{MultiIndex{0}, 1.0}, {MultiIndex{1}, 2.0}, {MultiIndex{2}, 2.0}};
  EXPECT_DOUBLE_EQ(mixed_sequence_norm(three, {{2.0}}), 3.0);
  std::map<MultiIndex, double> many{{MultiIndex{0, 0}, 1.0}, {MultiIndex{0, 1}, 5.0}, {MultiIndex{2, 1}, 4.0}};
  EXPECT_DOUBLE_EQ(mixed_sequence_norm(many, {{kInfinity, kInfinity}}), 5.0);
}

TEST(MixedSequenceNorm, InnerAxisFirst) {
  // a(s0, s1): inner l_1 over s0, outer l_2 over s1.
  std::map<MultiIndex, double> v{{MultiIndex{0, 0}, 1.0}, {MultiIndex{1, 0}, 2.0}, {MultiIndex{0, 1}, 4.0}};
  EXPECT_NEAR(mixed_sequence_norm(v, {{1.0, 2.0}}), std::sqrt(9.0 + 16.0), 1e-14);
  EXPECT_NEAR(mixed_sequence_norm(v, {{2.0, 1.0}}), std::sqrt(5.0) + 4.0, 1e-14);
}

TEST(MixedSequenceNorm, QuasiNormAndAbsentSupport) {
  std::map<MultiIndex, double> v{{MultiIndex{0}, 1.0}, {MultiIndex{1}, 1.0}};
  EXPECT_NEAR(mixed_sequence_norm(v, {{0.5}}), 4.0, 1e-14);
  const std::vector<MultiIndex> support{MultiIndex{0}, MultiIndex{1}, MultiIndex{5}};
  EXPECT_NEAR(mixed_sequence_norm(v, {{2.0}}, support), std::sqrt(2.0), 1e-14);
  EXPECT_DOUBLE_EQ(mixed_sequence_norm({}, {{2.0}}), 0.0);
  EXPECT_THROW(mixed_sequence_norm(v, {{0.0}}), std::invalid_argument);
}

TEST(MixedSequenceNorm, Homogeneity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<MultiIndex, double> v, w;
  for (std::int64_t a = 0; a < 5; ++a)
    for (std::int64_t b = 0; b < 4; ++b) {
      v[MultiIndex{a, b}] = u(rng);
      w[MultiIndex{a, b}] = 3.0 * v[MultiIndex{a, b}];
    }
  const SequenceNormSpec spec{{1.5, 0.7}};
  EXPECT_NEAR(mixed_sequence_norm(w, spec), 3.0 * mixed_sequence_norm(v, spec), 1e-12);
}
