#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "regcomply/parallel.hpp"
#include "regcomply/random.hpp"

using namespace regcomply;

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, UniformsInUnitInterval) {
  const CounterRng rng(42);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = rng.uniform_pair(i, 0);
    ASSERT_GT(a, 0.0);
    ASSERT_LE(a, 1.0);
    ASSERT_GT(b, 0.0);
    ASSERT_LE(b, 1.0);
    sum += a + b;
  }
  EXPECT_NEAR(sum / (2.0 * n), 0.5, 4.0 * std::sqrt(1.0 / 12.0 / (2.0 * n)));
}

TEST(CounterRng, NormalMoments) {
  const CounterRng rng(7, 3);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto g = rng.normal_pair(i, 1);
    s1 += g[0] + g[1];
    s2 += g[0] * g[0] + g[1] * g[1];
  }
  EXPECT_NEAR(s1 / (2.0 * n), 0.0, 4.0 / std::sqrt(2.0 * n));
  EXPECT_NEAR(s2 / (2.0 * n), 1.0, 4.0 * std::sqrt(2.0 / (2.0 * n)));
}

TEST(CounterRng, StreamsAndSeedsDiffer) {
  EXPECT_NE(CounterRng(1).block(0, 0), CounterRng(2).block(0, 0));
  EXPECT_NE(CounterRng(1, 0).block(0, 0), CounterRng(1, 1).block(0, 0));
  EXPECT_EQ(CounterRng(1, 1).block(5, 2), CounterRng(1, 1).block(5, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(mix_seed(9, s));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (std::size_t workers : {1u, 2u, 8u}) {
    std::vector<int> hit(1003, 0);
    parallel_for(hit.size(), workers, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) EXPECT_EQ(h, 1);
  }
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
