#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "regcomply/core.hpp"
#include "regcomply/errors.hpp"

using namespace regcomply;

TEST(NormalizeWeights, DividesByMax) {
  const auto w = normalize_weights({2, 1, 0.5});
  EXPECT_EQ(w.vec(), (Vector{1, 0.5, 0.25}));
  EXPECT_EQ(normalize_weights({1, 1, 1}).vec(), (Vector{1, 1, 1}));
  EXPECT_TRUE(normalize_weights({3, 3}).is_uniform());
}

TEST(NormalizeWeights, RejectsBadInput) {
  EXPECT_THROW(normalize_weights({0, 1}), DomainError);
  EXPECT_THROW(normalize_weights({-1, 1}), DomainError);
  EXPECT_THROW(normalize_weights(Vector{}), DomainError);
  EXPECT_THROW(normalize_weights({1, std::nan("")}), DomainError);
  EXPECT_THROW(normalize_weights({1, INFINITY}), DomainError);
}

TEST(NormalizeWeights, MaxIsExactlyOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-3, 50.0);
  for (int t = 0; t < 200; ++t) {
    Vector raw(1 + t % 7);
    for (double& x : raw) x = u(rng);
    const auto w = normalize_weights(raw);
    EXPECT_EQ(*std::max_element(w.vec().begin(), w.vec().end()), 1.0);
    for (double x : w.vec()) EXPECT_GT(x, 0.0);
  }
}

TEST(SparsityModel, Validation) {
  EXPECT_THROW(SparsityModel(0, 1), DomainError);
  EXPECT_THROW(SparsityModel(3, 0), DomainError);
  EXPECT_TRUE(SparsityModel(3, 2).below_dimension_condition());
  EXPECT_FALSE(SparsityModel(4, 2).below_dimension_condition());
}

TEST(SignedSupport, Validation) {
  const SparsityModel m(4, 1);
  EXPECT_THROW(SignedSupport({{0, 1}, {0, -1}}), DomainError);
  EXPECT_THROW(SignedSupport({{0, 2}}), DomainError);
  EXPECT_THROW(SignedSupport({{0, 1}, {1, 1}}).validate_against(m), DomainError);
  EXPECT_THROW(SignedSupport::single(4, 1).validate_against(m), DomainError);
  const SignedSupport s({{2, -1}, {0, 1}});
  EXPECT_EQ(s.entries()[0].index, 0u);
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(1));
}

TEST(SortedMagnitudeView, TiesByLowestIndex) {
  const Vector z{1, -3, 3, 0.5, -1};
  const SortedMagnitudeView v(z);
  const std::vector<std::size_t> want{1, 2, 0, 4, 3};
  EXPECT_EQ(std::vector<std::size_t>(v.order().begin(), v.order().end()), want);
  const auto [top, rest] = v.split_energy(2);
  EXPECT_DOUBLE_EQ(top, 18.0);
  EXPECT_DOUBLE_EQ(rest, 2.25);
}

TEST(WeightedL1, Examples) {
  EXPECT_DOUBLE_EQ(weighted_l1(Vector{1, -2, 3}, WeightVector::ones(3)), 6.0);
  EXPECT_DOUBLE_EQ(weighted_l1(Vector{1, -2, 3}, normalize_weights({1, 0.5, 0.5})), 3.5);
  EXPECT_DOUBLE_EQ(weighted_l1(Vector{0, 0, 0}, WeightVector::ones(3)), 0.0);
  EXPECT_THROW(weighted_l1(Vector{1, 2}, WeightVector::ones(3)), DimensionMismatch);
}

TEST(SignedDescentCone, Examples) {
  const auto w = WeightVector::ones(3);
  const auto s = SignedSupport::single(0, +1);
  EXPECT_TRUE(signed_descent_cone_contains(w, s, Vector{-1, 0.5, 0.4}));
  EXPECT_FALSE(signed_descent_cone_contains(w, s, Vector{-1, 0.6, 0.5}));
  EXPECT_TRUE(signed_descent_cone_contains(w, s, Vector{-1, 1, 0}));
  EXPECT_THROW(signed_descent_cone_contains(w, s, Vector{1, 2}), DimensionMismatch);
}

TEST(ModelDescentSet, Examples) {
  const SparsityModel m(3, 1);
  EXPECT_TRUE(model_descent_set_contains(WeightVector::ones(3), m, Vector{1, 0.5, 0.4}));
  EXPECT_FALSE(model_descent_set_contains(WeightVector::ones(3), m, Vector{1, 1, 1}));
  // A large entry on a light coordinate is cheap.
  EXPECT_TRUE(model_descent_set_contains(normalize_weights({1, 1, 0.1}), m, Vector{0, 0.5, 4}));
  EXPECT_FALSE(model_descent_set_contains(normalize_weights({1, 1, 0.1}), m, Vector{0.5, 0.5, 4}));
}

TEST(ModelDescentSet, TopSupportDominatesEveryOtherSupport) {
  // Membership via the top-k of w_i|z_i| agrees with trying every k-support.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::normal_distribution<double> g;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 3 + t % 3, k = 1 + t % 2;
    Vector raw(n), z(n);
    for (double& x : raw) x = u(rng);
    for (double& x : z) x = g(rng);
    const auto w = normalize_weights(raw);
    bool any = false;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != int(k)) continue;
      double in = 0, out = 0;
      for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? in : out) += w[i] * std::abs(z[i]);
      any = any || in >= out;
    }
    EXPECT_EQ(model_descent_set_contains(w, SparsityModel(n, k), z), any);
  }
}

TEST(DescentPredicates, ScaleInvariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 1.0), t(1e-3, 1e3);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector raw(4), z(4);
    for (double& x : raw) x = u(rng);
    for (double& x : z) x = g(rng);
    const auto w = normalize_weights(raw);
    const double s = t(rng);
    Vector sz = z;
    for (double& x : sz) x *= s;
    const auto sup = SignedSupport::single(trial % 4, trial % 2 ? 1 : -1);
    EXPECT_EQ(signed_descent_cone_contains(w, sup, z), signed_descent_cone_contains(w, sup, sz));
    EXPECT_EQ(model_descent_set_contains(w, SparsityModel(4, 2), z),
              model_descent_set_contains(w, SparsityModel(4, 2), sz));
  }
}

TEST(SignedDescentCone, AgreesWithDirectNormDecrease) {
  // For x in Sigma_k with sign pattern s and large magnitudes, ||x+z||_w <= ||x||_w
  // exactly matches the conic predicate.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 1.0), mag(50.0, 100.0);
  int agree_true = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 3 + t % 3;
    Vector raw(n), z(n), x(n, 0.0);
    for (double& v : raw) v = u(rng);
    for (double& v : z) v = g(rng);
    const auto w = normalize_weights(raw);
    const std::size_t i = t % n, j = (t / n) % n;
    std::vector<SignedSupport::Entry> e{{i, t % 2 ? 1 : -1}};
    if (j != i && t % 3 == 0) e.push_back({j, (t / 7) % 2 ? 1 : -1});
    const SignedSupport s(e);
    for (const auto& en : s.entries()) x[en.index] = en.sign * mag(rng);
    Vector xz(n);
    for (std::size_t d = 0; d < n; ++d) xz[d] = x[d] + z[d];
    const double lhs = weighted_l1(xz, w), rhs = weighted_l1(x, w);
    const bool decrease = lhs <= rhs;
    if (decrease) {
      EXPECT_TRUE(signed_descent_cone_contains(w, s, z));
      ++agree_true;
    } else if (lhs > rhs * (1 + 1e-12)) {
      EXPECT_FALSE(signed_descent_cone_contains(w, s, z));
    }
  }
  EXPECT_GT(agree_true, 100);
}

TEST(DescentPredicates, SignedConeImpliesModelMembership) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  int hits = 0;
  for (int t = 0; t < 5000; ++t) {
    Vector raw(4), z(4);
    for (double& v : raw) v = u(rng);
    for (double& v : z) v = g(rng);
    const auto w = normalize_weights(raw);
    const auto s = SignedSupport::single(t % 4, t % 2 ? 1 : -1);
    if (signed_descent_cone_contains(w, s, z)) {
      ++hits;
      EXPECT_TRUE(model_descent_set_contains(w, SparsityModel(4, 1), z));
    }
  }
  EXPECT_GT(hits, 50);
}

TEST(SplitByWeight, TopWeightsFirst) {
  const auto split = split_by_weight(normalize_weights({0.5, 1, 0.25, 0.75}), 2);
  EXPECT_EQ(split.top, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(split.rest_asc, (std::vector<std::size_t>{2, 0}));
}
