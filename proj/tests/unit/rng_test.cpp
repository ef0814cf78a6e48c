#include <gtest/gtest.h>

#include <cmath>

#include "boxlab/parallel.hpp"
#include "boxlab/rng.hpp"

using namespace boxlab;

TEST(CounterRng, SameKeySameStream) {
  CounterRng a(1, 2, 3, Stream::chi), b(1, 2, 3, Stream::chi);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(CounterRng, KeysAreIndependent) {
  CounterRng base(1, 2, 3, Stream::chi);
  auto first = base.next();
  EXPECT_NE(CounterRng(1, 2, 3, Stream::box).next(), first);
  EXPECT_NE(CounterRng(1, 2, 4, Stream::chi).next(), first);
  EXPECT_NE(CounterRng(1, 3, 3, Stream::chi).next(), first);
  EXPECT_NE(CounterRng(2, 2, 3, Stream::chi).next(), first);
}

TEST(CounterRng, UniformRange) {
  CounterRng r(9, 0, 0, Stream::chi);
  for (int i = 0; i < 10000; ++i) {
    double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(CounterRng, BelowIsUnbiasedEnough) {
  std::array<int, 3> counts{};
  const int n = 30000;
  for (int t = 0; t < n; ++t) ++counts[CounterRng(4, 0, static_cast<std::uint64_t>(t), Stream::chi).below(3)];
  for (int c : counts) EXPECT_NEAR(c, n / 3.0, 4.0 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
}

TEST(UnitVector, IsUnitAndIsotropic) {
  CounterRng r(3, 0, 0, Stream::chi_plus);
  Vec3 mean{0, 0, 0};
  double zz = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto v = random_unit_vector(r);
    EXPECT_NEAR(norm(v), 1.0, 1e-12);
    mean = mean + v;
    zz += v.z * v.z;
  }
  double se = std::sqrt(1.0 / 3.0 / n);
  EXPECT_NEAR(mean.x / n, 0.0, 5 * se);
  EXPECT_NEAR(mean.y / n, 0.0, 5 * se);
  EXPECT_NEAR(mean.z / n, 0.0, 5 * se);
  EXPECT_NEAR(zz / n, 1.0 / 3.0, 0.01);
}

TEST(ParallelReduce, IndependentOfThreadCount) {
  auto body = [](std::uint64_t b, std::uint64_t e, std::uint64_t& acc) {
    for (auto i = b; i < e; ++i) acc += CounterRng(1, 0, i, Stream::chi).next() % 1000;
  };
  auto merge = [](std::uint64_t& a, const std::uint64_t& b) { a += b; };
  auto one = parallel_reduce(100000, 1, std::uint64_t{0}, body, merge);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(parallel_reduce(100000, t, std::uint64_t{0}, body, merge), one);
}
