#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "boxlab/srx.hpp"
#include "generators.hpp"

using namespace boxlab;

namespace {

Event at(double t, double x) { return {t, {x, 0.0}, ""}; }

std::vector<MeasurementPair> grid() {
  std::vector<MeasurementPair> out;
  for (double d : default_theta_grid_degrees()) out.push_back(MeasurementPair::at_angle(degrees_to_radians(d)));
  return out;
}

EmbeddingConfig base_config(SrxConfig srx, std::uint64_t trials = 20000) {
  EmbeddingConfig c;
  c.srx = srx;
  c.alice = at(0.0, 0.0);
  c.bob = at(1.0, 5.0);
  c.trials = trials;
  c.seed = 99;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(SignalSpeed, Validation) {
  EXPECT_THROW(SignalSpeed::finite(0.5), InvalidArgument);
  EXPECT_THROW(SignalSpeed::finite(std::numeric_limits<double>::infinity()), InvalidArgument);
  EXPECT_TRUE(SignalSpeed::infinite().at_least(1e300));
  EXPECT_GT(kQuantumGravitySpeedBound, 1e60);
}

TEST(SrxConfig, OpeningAngle) {
  EXPECT_DOUBLE_EQ(SrxConfig::special_relativity().theta_lambda(), std::numbers::pi / 4);
  EXPECT_DOUBLE_EQ(SrxConfig::newtonian().theta_lambda(), std::numbers::pi / 2);
  double mid = SrxConfig{SignalSpeed::finite(3.0)}.theta_lambda();
  EXPECT_GT(mid, std::numbers::pi / 4);
  EXPECT_LT(mid, std::numbers::pi / 2);
}

TEST(Causality, Examples) {
  EXPECT_TRUE(x_causally_connected(at(0, 0), at(0, 1e9), SrxConfig::newtonian()));
  EXPECT_FALSE(x_causally_connected(at(0, 0), at(1, 2), SrxConfig::special_relativity()));
  // Reference from tests/oracle: 2/1 <= 3.
  EXPECT_TRUE(x_causally_connected(at(0, 0), at(1, 2), SrxConfig{SignalSpeed::finite(3.0)}));
  EXPECT_TRUE(sr_lightcone_connected(at(0, 0), at(2, 1)));
  EXPECT_FALSE(sr_lightcone_connected(at(0, 0), at(1, 2)));
}

TEST(Causality, SimultaneousDistinctEventsNeedInfiniteSpeed) {
  EXPECT_FALSE(x_causally_connected(at(0, 0), at(0, 1), SrxConfig{SignalSpeed::finite(1e12)}));
  EXPECT_TRUE(x_causally_connected(at(0, 0), at(0, 1), SrxConfig::newtonian()));
}

TEST(Causality, MonotoneInSpeed) {
  gen::Gen g(31);
  for (int i = 0; i < 10000; ++i) {
    auto e1 = g.event();
    auto e2 = g.event();
    double v1 = 1.0 + g.real(0.0, 20.0);
    double v2 = v1 + g.real(0.0, 20.0);
    bool slow = x_causally_connected(e1, e2, SrxConfig{SignalSpeed::finite(v1)});
    bool fast = x_causally_connected(e1, e2, SrxConfig{SignalSpeed::finite(v2)});
    if (slow) {
      EXPECT_TRUE(fast);
    }
    if (sr_lightcone_connected(e1, e2)) {
      EXPECT_TRUE(slow);
    }
    EXPECT_TRUE(x_causally_connected(e1, e2, SrxConfig::newtonian()));
    EXPECT_EQ(x_causally_connected(e1, e2, SrxConfig{SignalSpeed::finite(v1)}),
              x_causally_connected(e2, e1, SrxConfig{SignalSpeed::finite(v1)}));
  }
}

TEST(Frames, TimelikePairsKeepTheirOrder) {
  gen::Gen g(32);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    auto e1 = g.event();
    auto e2 = g.event();
    if (!sr_lightcone_connected(e1, e2) || e1.t == e2.t) continue;
    ++checked;
    EXPECT_TRUE(detector_frames_agree(e1, e2, g.real(-0.99, 0.99), g.real(-0.99, 0.99)));
  }
  EXPECT_GT(checked, 100);
}

TEST(Frames, SpacelikePairCanBeReordered) {
  EXPECT_FALSE(detector_frames_agree(at(0, 0), at(1, 5), 0.0, 0.9));
  EXPECT_TRUE(detector_frames_agree(at(0, 0), at(1, 5), 0.0, 0.1));
}

TEST(Embedding, NewtonianMatchesBareSimulation) {
  SingletProtocol proto(SingletResource::pr_box(), grid());
  auto run = embed_and_run(base_config(SrxConfig::newtonian()), proto);
  auto bare = run_singlet_sim(SingletResource::pr_box(), grid(), 20000, 99, 1);
  ASSERT_EQ(run.tallies.size(), bare.size());
  for (std::size_t i = 0; i < bare.size(); ++i) EXPECT_EQ(run.tallies[i], bare[i].tally);
  EXPECT_EQ(run.fallbacks, 0u);
  EXPECT_FALSE(run.relabeled);
}

TEST(Embedding, FastEnoughFiniteSpeedMatchesNewtonian) {
  SingletProtocol proto(SingletResource::toner_bacon(), grid());
  auto newton = embed_and_run(base_config(SrxConfig::newtonian(), 5000), proto);
  auto fast = embed_and_run(base_config({SignalSpeed::finite(6.0)}, 5000), proto);
  EXPECT_TRUE(fast.condition_holds);
  EXPECT_EQ(fast.tallies, newton.tallies);
}

TEST(Embedding, BreakdownDegradesCorrelations) {
  SingletProtocol proto(SingletResource::toner_bacon(), {MeasurementPair::at_angle(0.0)});
  auto cfg = base_config(SrxConfig::special_relativity(), 20000);
  auto run = embed_and_run(cfg, proto);
  EXPECT_FALSE(run.condition_holds);
  EXPECT_EQ(run.fallbacks, 20000u);
  double xor_rate = static_cast<double>(run.tallies[0].xor_ones) / 20000.0;
  EXPECT_NEAR(xor_rate, 0.5, 4.0 * std::sqrt(0.25 / 20000.0));
}

TEST(Embedding, PrBoxVariantAlsoRidesOnTheOnticSignal) {
  // Ontically the PR box is a mixture of 1-bit boxes, so it fails with the signal too.
  SingletProtocol proto(SingletResource::pr_box(), {MeasurementPair::at_angle(0.0)});
  auto ok = embed_and_run(base_config(SrxConfig::newtonian(), 2000), proto);
  EXPECT_EQ(ok.tallies[0].xor_ones, 2000u);
  auto broken = embed_and_run(base_config(SrxConfig::special_relativity(), 20000), proto);
  EXPECT_EQ(broken.messages_delivered, 0u);
  double rate = static_cast<double>(broken.tallies[0].xor_ones) / 20000.0;
  EXPECT_NEAR(rate, 0.5, 4.0 * std::sqrt(0.25 / 20000.0));
}

TEST(Embedding, EventsAreRelabeledByTime) {
  SingletProtocol proto(SingletResource::pr_box(), {MeasurementPair::at_angle(0.5)});
  auto cfg = base_config(SrxConfig::newtonian(), 100);
  std::swap(cfg.alice, cfg.bob);
  auto run = embed_and_run(cfg, proto);
  EXPECT_TRUE(run.relabeled);
  EXPECT_LE(run.config.alice.t, run.config.bob.t);
}

TEST(Embedding, WorldlineMustReachBothStations) {
  SingletProtocol proto(SingletResource::pr_box(), {MeasurementPair::at_angle(0.5)});
  auto cfg = base_config(SrxConfig::special_relativity(), 10);
  cfg.worldline = {at(-1.0, 0.0)};
  EXPECT_THROW(embed_and_run(cfg, proto), InvalidArgument);
  cfg.worldline = {at(-10.0, 2.0)};
  EXPECT_NO_THROW(embed_and_run(cfg, proto));
}

TEST(Embedding, DeterministicAcrossThreads) {
  MixedModeProtocol proto(Rational(9, 10), Rational(1, 2));
  auto cfg = base_config(SrxConfig::newtonian(), 30000);
  auto one = embed_and_run(cfg, proto);
  cfg.threads = 5;
  auto many = embed_and_run(cfg, proto);
  EXPECT_EQ(one.tallies, many.tallies);
  ASSERT_EQ(one.ontic.size(), many.ontic.size());
  for (std::size_t i = 0; i < one.ontic.size(); ++i) EXPECT_EQ(one.ontic[i].ontic_key, many.ontic[i].ontic_key);
}

TEST(Audit, CleanRunHasNoLeaks) {
  SingletProtocol proto(SingletResource::toner_bacon(), {MeasurementPair::at_angle(0.5)});
  auto run = embed_and_run(base_config(SrxConfig::newtonian(), 1000), proto);
  auto audit = audit_obliviousness(run.base);
  EXPECT_EQ(audit.records_scanned, 1000u);
  EXPECT_EQ(audit.leaked_fields, 0u);
  EXPECT_TRUE(audit.clean());
}

TEST(Audit, DetectsPlantedLeak) {
  SingletProtocol proto(SingletResource::toner_bacon(), {MeasurementPair::at_angle(0.5)});
  auto run = embed_and_run(base_config(SrxConfig::newtonian(), 1000), proto);
  run.base[17].leak(3, Oblivious{static_cast<int>(run.ontic[17].ontic_key)});
  run.base[400].leak(0, Oblivious{1});
  auto audit = audit_obliviousness(run.base);
  EXPECT_EQ(audit.leaked_fields, 2u);
  EXPECT_FALSE(audit.clean());
}

TEST(Report, TonerBaconLevels) {
  SingletProtocol proto(SingletResource::toner_bacon(), {MeasurementPair::at_angle(0.7)});
  auto run = embed_and_run(base_config(SrxConfig::newtonian(), 20000), proto);
  auto rep = ontic_vs_operational_report(run, proto);
  EXPECT_EQ(rep.s_model, 0.0);
  EXPECT_EQ(rep.i_model, 0.5);
  EXPECT_TRUE(rep.zero_signal_consistent);
  ASSERT_EQ(rep.levels.size(), 3u);
  EXPECT_EQ(rep.levels[0].ontology, "trivial");
  EXPECT_EQ(rep.levels[0].s_lambda, 0.0);
  EXPECT_EQ(rep.levels[0].i_lambda, 0.5);
  EXPECT_EQ(rep.levels[1].s_lambda, 1.0);
  EXPECT_EQ(rep.levels[1].i_lambda, 0.0);
  EXPECT_TRUE(rep.theorems_hold);
  EXPECT_EQ(rep.s_lambda_trace, 1.0);
  EXPECT_EQ(rep.i_lambda_trace, 0.0);
}

TEST(Report, PrBoxChiLevelIsBoxAntibox) {
  SingletProtocol proto(SingletResource::pr_box(), {MeasurementPair::at_angle(0.7)});
  auto run = embed_and_run(base_config(SrxConfig::newtonian(), 2000), proto);
  auto rep = ontic_vs_operational_report(run, proto);
  EXPECT_EQ(rep.levels[1].s_lambda, 1.0);
  EXPECT_EQ(rep.levels[1].i_lambda, 0.0);
  for (const auto& l : rep.levels) {
    EXPECT_TRUE(l.fwt_holds);
    EXPECT_TRUE(l.ut_holds);
    EXPECT_GE(l.complementarity_slack, -1e-12);
  }
}

TEST(HiddenInfluence, FiniteSpeedSignals) {
  HieGeometry g{10.0, 1.0, 0.0, 1.0};
  auto r = hidden_influence_scenario({SignalSpeed::finite(20.0)}, g, 10000, 5);
  EXPECT_GE(r.signal(), 0.95);
  EXPECT_TRUE(r.with_alice.reaches_first);
  EXPECT_TRUE(r.with_alice.reaches_second);
}

TEST(HiddenInfluence, NewtonianDoesNotSignal) {
  HieGeometry g{10.0, 1.0, 0.0, 1.0};
  auto r = hidden_influence_scenario(SrxConfig::newtonian(), g, 10000, 5);
  EXPECT_LE(r.signal(), 0.02);
}

TEST(HiddenInfluence, LateInfluenceGivesNoSignal) {
  HieGeometry g{10.0, 1.0, 0.0, 1.0};
  auto r = hidden_influence_scenario({SignalSpeed::finite(5.0)}, g, 10000, 5);
  EXPECT_FALSE(r.with_alice.reaches_first);
  EXPECT_FALSE(r.with_alice.reaches_second);
  EXPECT_LE(r.signal(), 4.0 * std::hypot(r.with_alice.correlation_stderr(), r.without_alice.correlation_stderr()));
}

TEST(HiddenInfluence, GeometryIsValidated) {
  EXPECT_THROW(hidden_influence_scenario(SrxConfig::newtonian(), {5.0, 1.0, 0.0, 1.0}, 10, 1), InvalidArgument);
  EXPECT_THROW(hidden_influence_scenario(SrxConfig::newtonian(), {10.0, 1.0, 1.0, 1.0}, 10, 1), InvalidArgument);
}
