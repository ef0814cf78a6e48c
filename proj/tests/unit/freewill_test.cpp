#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "boxlab/freewill.hpp"

using namespace boxlab;

TEST(LMode, Endpoints) {
  auto uniform = build_L_mode(Rational(1, 4));
  EXPECT_EQ(uniform.free_will, 1);
  EXPECT_EQ(uniform.lambda, 2);
  auto biased = build_L_mode(Rational(0));
  EXPECT_EQ(biased.free_will, Rational(2, 3));
  EXPECT_EQ(biased.lambda, 4);
  EXPECT_EQ(biased.correlation, pr_box<Rational>());
}

TEST(LMode, FreeWillLawOnGrid) {
  for (int k = 0; k <= 16; ++k) {
    auto m = build_L_mode(Rational(k, 64));
    EXPECT_EQ(m.lambda, 2 * (4 - 3 * m.free_will));
    EXPECT_EQ(signaling(m.correlation).s, 0);
  }
}

TEST(LMode, CirelsonValue) {
  double alpha = (2.0 - std::numbers::sqrt2) / 4.0;
  auto m = build_L_mode(alpha);
  EXPECT_NEAR(m.free_will, (4.0 - std::numbers::sqrt2) / 3.0, 1e-12);
  EXPECT_NEAR(m.lambda, 2.0 * std::numbers::sqrt2, 1e-12);
}

TEST(LMode, RejectsAlphaOutsideRange) {
  EXPECT_THROW(build_L_mode(Rational(1, 3)), InvalidArgument);
  EXPECT_THROW(build_L_mode(Rational(-1, 8)), InvalidArgument);
}

TEST(PartialMix, SignalsWithBetaMinusAlpha) {
  EXPECT_EQ(signaling(build_partial_L<Rational>({0, 1, 2, 3}, Rational(0))).s, Rational(1, 3));
  EXPECT_EQ(signaling(build_partial_L<Rational>({0, 1, 2, 3}, Rational(1, 4))).s, 0);
  // Reference value from tests/oracle/derive_fixtures.py.
  EXPECT_EQ(signaling(build_partial_L<Rational>({3, 2, 1, 0}, Rational(1, 8))).s, Rational(1, 6));
}

TEST(PartialMix, OnlyTheFirstFourBoxes) {
  EXPECT_THROW(build_partial_L<Rational>({0, 1, 2, 4}, Rational(0)), InvalidArgument);
  EXPECT_THROW(build_partial_L<Rational>({0, 1, 2}, Rational(0)), InvalidArgument);
}

TEST(LFMode, PureOneBitLimit) {
  auto m = build_LF_mode(Rational(1, 16), Rational(0));
  EXPECT_EQ(m.free_will, 1);
  EXPECT_EQ(m.lambda, 4);
}

TEST(LFMode, FullZeroBitLimitMatchesLMode) {
  for (int k = 0; k <= 4; ++k) {
    Rational alpha(k, 16);
    auto lf = build_LF_mode(alpha, Rational(1));
    auto l = build_L_mode(alpha);
    EXPECT_EQ(lf.free_will, l.free_will);
    EXPECT_EQ(lf.lambda, l.lambda);
    EXPECT_EQ(lf.correlation, l.correlation);
  }
}

TEST(LFMode, HalfMixture) {
  // Reference value from tests/oracle/derive_fixtures.py.
  auto m = build_LF_mode(Rational(0), Rational(1, 2));
  EXPECT_EQ(m.free_will, Rational(5, 6));
  EXPECT_EQ(m.lambda, 4);
}

TEST(LFMode, GeneralLaw) {
  for (int a = 0; a <= 4; ++a) {
    for (int li = 0; li <= 4; ++li) {
      Rational alpha(a, 16), l(li, 4);
      auto m = build_LF_mode(alpha, l);
      EXPECT_EQ(m.free_will, 1 - (l / 3) * (1 - 4 * alpha));
      EXPECT_EQ(m.lambda, 4 * (1 - 2 * alpha * l));
      EXPECT_EQ(m.lambda, 4 - 6 * (m.free_will - 1) - 2 * l);
    }
  }
}

TEST(FMode, ChshIsTwoPlusTwoC) {
  for (int k = 0; k <= 8; ++k) {
    Rational c(k, 8);
    auto m = build_F_mode(c);
    EXPECT_EQ(m.lambda, 2 + 2 * c);
    EXPECT_EQ(m.free_will, 1);
  }
}

TEST(MixedMode, BranchProbability) {
  EXPECT_EQ(mixed_mode_pf(Rational(1), Rational(1)), 1);
  EXPECT_EQ(mixed_mode_pf(Rational(2, 3), Rational(1)), 0);
  // Reference value from tests/oracle/derive_fixtures.py.
  EXPECT_EQ(mixed_mode_pf(Rational(9, 10), Rational(1)), Rational(7, 10));
}

TEST(MixedMode, ReachesTargetFreeWillAndCost) {
  for (int ci = 1; ci <= 4; ++ci) {
    Rational c(ci, 4);
    for (int fi = 0; fi <= 4; ++fi) {
      Rational f = 1 - c / 3 + (c / 3) * Rational(fi, 4);
      auto m = build_mixed_mode(f, c);
      EXPECT_EQ(m.free_will, f);
      EXPECT_EQ(m.c_lambda(), c);
      EXPECT_EQ(signaling(m.correlation).s, 0);
    }
  }
}

TEST(MixedMode, UnreachableFreeWillIsRejected) {
  EXPECT_THROW(build_mixed_mode(Rational(1, 2), Rational(1)), InvalidArgument);
}

TEST(Complementarity, BoundValues) {
  EXPECT_EQ(complementarity_bound(Rational(1), Rational(1)), 1);
  EXPECT_EQ(complementarity_bound(Rational(2, 3), Rational(1)), 0);
  EXPECT_NEAR(complementarity_bound(1.0, std::numbers::sqrt2 - 1.0), 0.41421356237309515, 1e-15);
}

TEST(Complementarity, ResourceFamilyMetrics) {
  for (int k = 0; k <= 4; ++k) {
    Rational s(k, 4);
    auto r = resource_family(s);
    EXPECT_EQ(signaling(r).s, s);
    EXPECT_EQ(randomness(r), (1 - s) / 2);
    EXPECT_EQ(chsh_lambda(r), 4);
  }
}

TEST(Complementarity, ExtremeResourcesAreTightAtFullCost) {
  auto m = build_mixed_mode(Rational(1), Rational(1));
  EXPECT_EQ(resource_accounting(m, resource_family(Rational(1))).slack, 0);
  EXPECT_EQ(resource_accounting(m, resource_family(Rational(0))).slack, 0);
}

TEST(Complementarity, ResourceMustBeMaximal) {
  auto m = build_mixed_mode(Rational(1), Rational(1));
  EXPECT_THROW(resource_accounting(m, uniform_local<Rational>()), InvalidArgument);
}

TEST(MixedModeSampler, RejectsBadParameters) {
  EXPECT_THROW(MixedModeSampler({1.5, 0.1, 0.5, false, 1.0}), InvalidArgument);
  EXPECT_THROW(MixedModeSampler({0.5, 0.3, 0.5, false, 1.0}), InvalidArgument);
}

TEST(MixedModeSampler, ChargesBitsOnlyForOneBitBoxes) {
  auto m = build_mixed_mode(Rational(9, 10), Rational(1, 2));
  auto s = MixedModeSampler::from_model(m);
  std::uint64_t bits = 0;
  const std::uint64_t n = 40000;
  for (std::uint64_t t = 0; t < n; ++t) {
    TrialKey k{5, 0, t};
    auto al = s.alice(k);
    EXPECT_EQ(al.comm_bits, (al.ontic_key & 16u) ? 1 : 0);
    bits += static_cast<std::uint64_t>(al.comm_bits);
  }
  // usage p_F C = 0.4 * 0.5
  double rate = static_cast<double>(bits) / static_cast<double>(n);
  EXPECT_NEAR(rate, 0.2, 4.0 * std::sqrt(0.2 * 0.8 / static_cast<double>(n)));
}
