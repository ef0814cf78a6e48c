#include <gtest/gtest.h>

#include "boxlab/metrics.hpp"
#include "boxlab/scheme.hpp"

using namespace boxlab;

namespace {

Correlation16<Rational> one_bit(int j) { return as_correlation<Rational>(DeterministicBox::one_bit(j)); }
Correlation16<Rational> zero_bit(int j) { return as_correlation<Rational>(DeterministicBox::zero_bit(j)); }

}  // namespace

TEST(Signaling, PrBoxIsNonSignaling) {
  auto r = signaling(pr_box<Rational>());
  EXPECT_EQ(r.s, 0);
  EXPECT_EQ(r.s_a_to_b, 0);
  EXPECT_EQ(r.s_b_to_a, 0);
}

TEST(Signaling, ZeroBitBoxesFactorize) {
  for (int j = 0; j < 8; ++j) EXPECT_EQ(signaling(zero_bit(j)).s, 0) << j;
}

TEST(Signaling, OneBitBoxesSignalFullyInOneDirection) {
  // The first four carry Alice's input to Bob, the last four carry Bob's input to Alice.
  for (int j = 0; j < 8; ++j) {
    auto r = signaling(one_bit(j));
    EXPECT_EQ(r.s, 1) << j;
    EXPECT_EQ(r.s_a_to_b, j < 4 ? 1 : 0) << j;
    EXPECT_EQ(r.s_b_to_a, j < 4 ? 0 : 1) << j;
  }
}

TEST(Signaling, DeltasVanishExactlyWithoutSignaling) {
  auto d = signaling_deltas(pr_box<Rational>());
  for (const auto& v : d) EXPECT_EQ(v, 0);
  auto s = signal_from_deltas(signaling_deltas(one_bit(0)));
  EXPECT_EQ(s, 1);
}

TEST(Randomness, PrBoxIsHalf) { EXPECT_EQ(randomness(pr_box<Rational>()), Rational(1, 2)); }

TEST(Randomness, DeterministicBoxesAreZero) {
  for (int j = 0; j < 8; ++j) {
    EXPECT_EQ(randomness(zero_bit(j)), 0);
    EXPECT_EQ(randomness(one_bit(j)), 0);
  }
}

TEST(Randomness, UnbalancedBoxAntiboxMixture) {
  // Reference value from tests/oracle/derive_fixtures.py.
  auto p = mix(std::vector<WeightedBox<Rational>>{{Rational(3, 4), one_bit(0)}, {Rational(1, 4), one_bit(3)}});
  EXPECT_EQ(randomness(p), Rational(1, 4));
}

TEST(OnticMetrics, BoxAntiboxEnsemble) {
  auto m = ontic_metrics(std::vector<WeightedBox<Rational>>{{Rational(1, 2), one_bit(0)}, {Rational(1, 2), one_bit(3)}});
  EXPECT_EQ(m.s_lambda, 1);
  EXPECT_EQ(m.i_lambda, 0);
}

TEST(OnticMetrics, TrivialEnsembleEqualsOperational) {
  auto m = ontic_metrics(std::vector<WeightedBox<Rational>>{{Rational(1), pr_box<Rational>()}});
  EXPECT_EQ(m.s_lambda, 0);
  EXPECT_EQ(m.i_lambda, Rational(1, 2));
}

TEST(OnticMetrics, UniformZeroBitEnsemble) {
  std::vector<WeightedBox<Rational>> ens;
  for (int j = 0; j < 8; ++j) ens.emplace_back(Rational(1, 8), zero_bit(j));
  auto m = ontic_metrics(ens);
  EXPECT_EQ(m.s_lambda, 0);
  EXPECT_EQ(m.i_lambda, 0);
}

TEST(OnticMetrics, AveragedNeverExceedsWorstCase) {
  std::vector<WeightedBox<Rational>> ens{
      {Rational(1, 3), one_bit(1)}, {Rational(1, 3), pr_box<Rational>()}, {Rational(1, 3), zero_bit(4)}};
  auto worst = ontic_metrics(ens);
  auto avg = ontic_metrics_averaged(ens);
  EXPECT_LE(avg.s_lambda, worst.s_lambda);
  EXPECT_LE(avg.i_lambda, worst.i_lambda);
  EXPECT_EQ(avg.s_lambda, Rational(1, 3));
  EXPECT_EQ(avg.i_lambda, Rational(1, 6));
}

TEST(FreeWill, UniformSchemeGivesFullFreeWill) {
  EXPECT_EQ(free_will(biased_conditioning(Rational(1, 4))), 1);
}

TEST(FreeWill, MaximallyBiasedScheme) {
  EXPECT_EQ(free_will(biased_conditioning(Rational(0))), Rational(2, 3));
}

TEST(FreeWill, GeneralAlpha) {
  for (int k = 0; k <= 16; ++k) {
    Rational alpha(k, 64);
    EXPECT_EQ(free_will(biased_conditioning(alpha)), (2 + 4 * alpha) / 3) << alpha;
    EXPECT_EQ(free_will(biased_conditioning(alpha)), 1 - abs_value(alpha - beta_from_alpha(alpha)));
  }
}

TEST(FreeWill, BayesConsistency) {
  auto cond = biased_conditioning(Rational(1, 10));
  EXPECT_TRUE(cond.bayes_consistent());
  for (std::size_t ab = 0; ab < 4; ++ab) EXPECT_EQ(cond.prior_ab()[ab], Rational(1, 4));
}

TEST(Telepathy, BiasedSchemeAtD40) {
  for (int k = 0; k < 16; ++k) {
    Rational alpha(k, 64);
    Rational beta = beta_from_alpha(alpha);
    auto rep = telepathy_check(biased_conditioning(alpha), 4);
    ASSERT_TRUE(rep.b_given_a[0].has_value());
    EXPECT_EQ((*rep.b_given_a[0])[0], beta / (alpha + beta));
    EXPECT_TRUE(rep.dependent);
  }
}

TEST(Telepathy, FullBiasMakesBobsInputCertain) {
  // Reference value from tests/oracle/derive_fixtures.py.
  auto rep = telepathy_check(biased_conditioning(Rational(0)), 4);
  EXPECT_EQ((*rep.b_given_a[0])[0], 1);
}

TEST(Telepathy, UniformSchemeIsIndependent) {
  auto cond = biased_conditioning(Rational(1, 4));
  for (std::size_t l = 0; l < 8; ++l) EXPECT_FALSE(telepathy_check(cond, l).dependent);
}

TEST(Spontaneity, FreeInputsWithPrBox) {
  std::array<Rational, 4> prior;
  prior.fill(Rational(1, 4));
  EXPECT_TRUE(spontaneity_check(JointDistribution<Rational>::from_inputs_and_box(prior, pr_box<Rational>())));
}

TEST(Spontaneity, PartialMixViolatesIt) {
  // Only the first four 0-bit boxes, each with its biased likelihood.
  Rational alpha(1, 12);
  auto cond = biased_conditioning(alpha);
  std::vector<typename InputConditioning<Rational>::Column> lik(4);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t ab = 0; ab < 4; ++ab) lik[j][ab] = cond.ab_given_lambda(ab, j);
  }
  std::vector<Rational> prior(4, Rational(1, 4));
  auto partial = InputConditioning<Rational>::from_likelihood(lik, prior);
  std::vector<Correlation16<Rational>> boxes;
  for (int j = 0; j < 4; ++j) boxes.push_back(zero_bit(j));
  EXPECT_FALSE(spontaneity_check(JointDistribution<Rational>::from_conditioning(partial, boxes)));
}

TEST(Spontaneity, FullBiasedSchemeIsSpontaneous) {
  for (int k = 0; k <= 4; ++k) {
    auto cond = biased_conditioning(Rational(k, 16));
    EXPECT_TRUE(spontaneity_check(JointDistribution<Rational>::from_conditioning(cond, zero_bit_correlations<Rational>())));
  }
}

TEST(Spontaneity, SignalingBoxWithFreeInputsIsNotSpontaneousEither) {
  std::array<Rational, 4> prior;
  prior.fill(Rational(1, 4));
  auto joint = JointDistribution<Rational>::from_inputs_and_box(prior, one_bit(0));
  EXPECT_FALSE(spontaneity_check(joint));
}

TEST(JointDistribution, RecoversConditionalBox) {
  std::array<Rational, 4> prior{Rational(1, 2), Rational(1, 6), Rational(1, 6), Rational(1, 6)};
  auto joint = JointDistribution<Rational>::from_inputs_and_box(prior, pr_box<Rational>());
  EXPECT_EQ(joint.input_probability(0, 0), Rational(1, 2));
  ASSERT_TRUE(joint.conditional_box().has_value());
  EXPECT_EQ(*joint.conditional_box(), pr_box<Rational>());
}
