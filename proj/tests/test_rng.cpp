#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "phaseprobe/rng.hpp"

namespace pp = phaseprobe;

TEST(Rng, SameSeedSameStream) {
  pp::Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || (x != c.next());
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformStaysInHalfOpenUnitInterval) {
  pp::Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMomentsWithinCltBands) {
  pp::Rng rng(2);
  const int n = 400000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_LE(std::abs(s1 / n), 3.0 / std::sqrt(n));
  EXPECT_LE(std::abs(s2 / n - 1.0), 3.0 * std::sqrt(2.0 / n));
  EXPECT_LE(std::abs(s4 / n - 3.0), 3.0 * std::sqrt(96.0 / n));
}

TEST(Rng, BelowIsUniformOverSmallRange) {
  pp::Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n / 7.0));
}

TEST(MixSeed, OrderSensitiveAndStable) {
  EXPECT_EQ(pp::mix_seed({1, 2, 3}), pp::mix_seed({1, 2, 3}));
  EXPECT_NE(pp::mix_seed({1, 2, 3}), pp::mix_seed({3, 2, 1}));
  EXPECT_NE(pp::mix_seed({1, 2}), pp::mix_seed({1, 2, 0}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t d : {256u, 512u, 1024u, 2048u}) {
    for (std::uint64_t k = 0; k < 10; ++k) seen.insert(pp::mix_seed({0, d, k}));
  }
  EXPECT_EQ(seen.size(), 40u);
}
