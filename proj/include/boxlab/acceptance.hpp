#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/decomposition.hpp"
#include "boxlab/freewill.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/numeric.hpp"
#include "boxlab/rng.hpp"
#include "boxlab/singlet.hpp"
#include "boxlab/srx.hpp"

namespace boxlab::acceptance {

struct Options {
  std::uint64_t seed = 20061;
  bool corrupt_table = false;  ///< negative control: flip one output of a 1-bit box
  unsigned threads = 0;
  int only = 0;                ///< run a single criterion when nonzero
};

struct Outcome {
  int id = 0;
  std::string name;
  std::string measured;
  std::string tolerance;
  double seconds = 0;
  double budget_seconds = 0;
  bool pass = false;
};

inline std::string format_line(const Outcome& o) {
  std::ostringstream os;
  os << (o.pass ? "PASS" : "FAIL") << " [" << o.id << "] " << o.name << " | measured: " << o.measured
     << " | tolerance: " << o.tolerance << " | time: " << to_string(std::round(o.seconds * 1000) / 1000) << "s/"
     << to_string(o.budget_seconds) << "s";
  return os.str();
}

namespace detail {

inline BoxTables tables_for(const Options& opt) {
  BoxTables t = kBoxTables;
  if (opt.corrupt_table) t.one_bit[2][1] ^= 0b01;
  return t;
}

inline std::vector<MeasurementPair> theta_grid() {
  std::vector<MeasurementPair> out;
  for (double d : default_theta_grid_degrees()) out.push_back(MeasurementPair::at_angle(degrees_to_radians(d)));
  return out;
}

inline std::string fmt(double v) { return to_string(v); }

/// Criterion 1: table checksum and CHSH values of every extreme box.
inline Outcome tables(const Options& opt) {
  auto t = tables_for(opt);
  std::uint64_t sum = table_checksum(t);
  bool lambdas = true;
  for (const auto& b : extreme_boxes(t)) {
    Rational want = b.kind() == BoxKind::ZeroBit ? Rational(2) : Rational(4);
    if (chsh_lambda(as_correlation<Rational>(b)) != want) lambdas = false;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "checksum=%016llx", static_cast<unsigned long long>(sum));
  return {1, "Table fixtures and CHSH values", std::string(buf) + " lambdas_ok=" + (lambdas ? "true" : "false"),
          "exact", 0, 1, sum == kBoxTablesChecksum && lambdas};
}

/// Criterion 2: PR box from d^{0_1}, d^{3_1}.
inline Outcome pr_metrics(const Options&) {
  std::vector<WeightedBox<Rational>> ens{{Rational(1, 2), as_correlation<Rational>(DeterministicBox::one_bit(0))},
                                         {Rational(1, 2), as_correlation<Rational>(DeterministicBox::one_bit(3))}};
  auto pr = mix(ens);
  auto s = signaling(pr).s;
  auto i = randomness(pr);
  auto ont = ontic_metrics(ens);
  bool ok = s == 0 && i == Rational(1, 2) && ont.s_lambda == 1 && ont.i_lambda == 0 && pr == pr_box<Rational>();
  return {2, "PR-box operational and ontic metrics",
          "S=" + to_string(s) + " I=" + to_string(i) + " S_lambda=" + to_string(ont.s_lambda) +
              " I_lambda=" + to_string(ont.i_lambda),
          "exact", 0, 1, ok};
}

/// Criterion 3: free-will law on the 1/64 grid, plus the Cirelson point in floating mode.
inline Outcome freewill_law(const Options&) {
  bool ok = true;
  int points = 0;
  for (int k = 0; k <= 16; ++k) {
    Rational alpha(k, 64);
    auto m = build_L_mode(alpha);
    Rational lam = chsh_lambda(m.correlation);
    if (m.free_will != (2 + 4 * alpha) / 3 || lam != 2 * (4 - 3 * m.free_will)) ok = false;
    ++points;
  }
  bool ends = build_L_mode(Rational(1, 4)).lambda == 2 && build_L_mode(Rational(0)).lambda == 4 &&
              build_L_mode(Rational(1, 4)).free_will == 1 && build_L_mode(Rational(0)).free_will == Rational(2, 3);
  double alpha_c = (2.0 - std::numbers::sqrt2) / 4.0;
  auto mc = build_L_mode(alpha_c);
  double f_target = (4.0 - std::numbers::sqrt2) / 3.0;
  double err_f = std::fabs(mc.free_will - f_target);
  double err_l = std::fabs(chsh_lambda(mc.correlation) - 2.0 * std::numbers::sqrt2);
  bool cirelson = err_f <= 1e-12 && err_l <= 1e-12;
  return {3, "Free-will law Lambda = 2(4 - 3F)",
          std::to_string(points) + " exact grid points ok=" + (ok ? "true" : "false") +
              " endpoints_ok=" + (ends ? "true" : "false") + " cirelson |dF|=" + fmt(err_f) + " |dLambda|=" + fmt(err_l),
          "exact on grid; 1e-12 at Cirelson point", 0, 5, ok && ends && cirelson};
}

/// Criterion 4: partial mix of four 0-bit boxes signals with S = beta - alpha.
inline Outcome partial_mix(const Options&) {
  bool ok = true;
  Rational worst(0);
  for (int k = 0; k < 20; ++k) {
    Rational alpha(k, 80);
    auto box = build_partial_L<Rational>({0, 1, 2, 3}, alpha);
    Rational diff = signaling(box).s - (beta_from_alpha(alpha) - alpha);
    if (diff != 0) ok = false;
    worst = std::max(worst, abs_value(diff));
  }
  return {4, "Partial-mix signaling S = beta - alpha", "20 points, max |S - (beta - alpha)| = " + to_string(worst),
          "exact", 0, 1, ok};
}

/// Random rational point of the fragment: sparse integer weights over the sixteen boxes.
inline std::pair<Correlation16<Rational>, std::array<Rational, 16>> random_fragment_point(CounterRng& rng) {
  std::array<std::int64_t, 16> w{};
  std::int64_t total = 0;
  while (total == 0) {
    for (auto& v : w) {
      v = rng.uniform() < 0.35 ? 0 : static_cast<std::int64_t>(rng.below(24));
      total += v;
    }
  }
  std::array<Rational, 16> weights{};
  std::vector<WeightedBox<Rational>> parts;
  auto boxes = extreme_boxes();
  for (std::size_t k = 0; k < 16; ++k) {
    weights[k] = Rational(w[k], total);
    parts.emplace_back(weights[k], as_correlation<Rational>(boxes[k]));
  }
  return {mix(parts), weights};
}

/// Criterion 5: decomposition reproduces P and its 1-bit weight is the LP minimum C_Lambda.
inline Outcome decomposition_optimality(const Options& opt) {
  int reproduced = 0;
  int optimal = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(opt.seed, 5, static_cast<std::uint64_t>(i), Stream::chi);
    auto [p, weights] = random_fragment_point(rng);
    auto d = construct_decomposition(p);
    if (d.correlation() == p) ++reproduced;
    Rational c = cost_from_lambda(chsh_lambda(p));
    auto lp_min = min_one_bit_weight(p);
    if (lp_min && d.p1_total() == c && *lp_min == c) ++optimal;
  }
  return {5, "Decomposition reproduction and optimality",
          std::to_string(reproduced) + "/" + std::to_string(n) + " reproduced, " + std::to_string(optimal) + "/" +
              std::to_string(n) + " with p1_total = C_Lambda = LP min",
          "exact", 0, 60, reproduced == n && optimal == n};
}

/// Criterion 6: S_R + 2 I_R >= C - 3(1 - F) over a grid, tight at the two extreme resources.
inline Outcome complementarity(const Options&) {
  bool ok = true;
  int checks = 0;
  Rational min_slack(100);
  std::vector<Rational> s_grid{Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};
  std::vector<Correlation16<Rational>> resources;
  for (const auto& s : s_grid) resources.push_back(resource_family(s));
  resources.push_back(mix(std::vector<WeightedBox<Rational>>{
      {Rational(1, 2), as_correlation<Rational>(DeterministicBox::one_bit(0))},
      {Rational(1, 2), as_correlation<Rational>(DeterministicBox::one_bit(1))}}));
  for (int ci = 0; ci <= 4; ++ci) {
    Rational c(ci, 4);
    for (int fi = 0; fi <= 4; ++fi) {
      Rational f = 1 - c / 3 + (c / 3) * Rational(fi, 4);
      auto m = build_mixed_mode(f, c);
      for (const auto& r : resources) {
        auto acc = resource_accounting(m, r);
        if (acc.slack < 0) ok = false;
        min_slack = std::min(min_slack, acc.slack);
        ++checks;
      }
    }
  }
  auto top = build_mixed_mode(Rational(1), Rational(1));
  Rational tb_slack = resource_accounting(top, resource_family(Rational(1))).slack;
  Rational pr_slack = resource_accounting(top, resource_family(Rational(0))).slack;
  bool tb_ext = signaling(resource_family(Rational(1))).s == 1 && randomness(resource_family(Rational(1))) == 0;
  bool pr_ext = signaling(resource_family(Rational(0))).s == 0 && randomness(resource_family(Rational(0))) == Rational(1, 2);
  bool tight = abs_value(tb_slack) <= Rational(1, 1000000000) && abs_value(pr_slack) <= Rational(1, 1000000000);
  return {6, "Complementarity S_R + 2 I_R >= C - 3(1 - F)",
          std::to_string(checks) + " checks, min slack " + to_string(min_slack) + ", extreme slacks (1,0): " +
              to_string(tb_slack) + " (0,1/2): " + to_string(pr_slack),
          "bound holds; slack <= 1e-9 at extremes", 0, 30, ok && tight && tb_ext && pr_ext};
}

/// Criterion 7: singlet Monte Carlo for both variants.
inline Outcome singlet(const Options& opt, std::vector<TrialTally>* pr_tallies) {
  auto grid = theta_grid();
  bool ok = true;
  double worst_z = 0, worst_mz = 0;
  for (auto res : {SingletResource::pr_box(), SingletResource::toner_bacon()}) {
    auto stats = run_singlet_sim(res, grid, 100000, opt.seed, opt.threads == 0 ? thread_count() : opt.threads);
    for (const auto& s : stats) {
      double se = s.standard_error();
      double z = se > 0 ? std::fabs(s.estimate() - s.target()) / se : (s.estimate() == s.target() ? 0.0 : 1e9);
      worst_z = std::max(worst_z, z);
      double za = std::fabs(s.marginal_a() - 0.5) / s.marginal_a_stderr();
      double zb = std::fabs(s.marginal_b() - 0.5) / s.marginal_b_stderr();
      worst_mz = std::max({worst_mz, za, zb});
      if (!s.within(4.0) || !s.marginals_within(4.0)) ok = false;
    }
    bool comm_ok = true;
    for (const auto& s : stats) {
      double expect = res.variant() == SingletVariant::pr_box ? 0.0 : 1.0;
      if (s.comm_bits_per_trial() != expect) comm_ok = false;
    }
    ok = ok && comm_ok;
    if (res.variant() == SingletVariant::pr_box && pr_tallies) {
      for (const auto& s : stats) pr_tallies->push_back(s.tally);
    }
  }
  return {7, "Singlet Monte Carlo <n_A xor n_B> = (1 + cos theta)/2",
          "12 angles x 2 variants x 1e5 trials, max |z| = " + fmt(worst_z) + ", marginal max |z| = " + fmt(worst_mz),
          "4 standard errors", 0, 120, ok};
}

/// Criterion 8: Newtonian embedding is statistics-preserving and oblivious.
inline Outcome embedding(const Options& opt, const std::vector<TrialTally>& reference) {
  auto grid = theta_grid();
  SingletProtocol proto(SingletResource::pr_box(), grid);
  EmbeddingConfig cfg;
  cfg.srx = SrxConfig::newtonian();
  cfg.alice = {0.0, {0.0, 0.0}, "A"};
  cfg.bob = {1.0, {5.0, 0.0}, "B"};
  cfg.trials = 100000;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;
  auto run = embed_and_run(cfg, proto);
  std::vector<TrialTally> ref = reference;
  if (ref.empty()) {
    for (const auto& s : run_singlet_sim(SingletResource::pr_box(), grid, 100000, opt.seed,
                                         opt.threads == 0 ? thread_count() : opt.threads)) {
      ref.push_back(s.tally);
    }
  }
  bool identical = run.tallies == ref;
  auto rep = ontic_vs_operational_report(run, proto);
  double zmax = *std::max_element(rep.delta_z.begin(), rep.delta_z.end());
  bool ok = identical && rep.s_model == 0.0 && rep.zero_signal_consistent && rep.audit.clean();
  return {8, "Newtonian embedding equivalence",
          std::string("bit-identical=") + (identical ? "true" : "false") + " S_model=" + fmt(rep.s_model) +
              " S_empirical=" + fmt(rep.s_empirical) + " (max |delta|/SE=" + fmt(zmax) + ") audit " +
              std::to_string(rep.audit.records_scanned) + " records, " + std::to_string(rep.audit.leaked_fields) +
              " leaks",
          "identical tallies; model S = 0; empirical |delta| <= 4 SE; zero leaks", 0, 120, ok};
}

/// Criterion 9: hidden-influence signaling iff v_lambda is finite.
inline Outcome hidden_influence(const Options& opt) {
  HieGeometry g{10.0, 1.0, 0.0, 1.0};
  auto finite = hidden_influence_scenario({SignalSpeed::finite(20.0)}, g, 10000, opt.seed);
  auto newton = hidden_influence_scenario(SrxConfig::newtonian(), g, 10000, opt.seed);
  bool ok = finite.v_exp < 20.0 && finite.signal() >= 0.95 && newton.signal() <= 0.02;
  return {9, "Hidden-influence signaling",
          "v_lambda=20 (v_exp=" + fmt(finite.v_exp) + "): signal " + fmt(finite.signal()) +
              "; v_lambda=inf: signal " + fmt(newton.signal()),
          ">= 0.95 finite; <= 0.02 infinite", 0, 30, ok};
}

/// Criterion 10: ontic theorems over the embedded resource family.
inline Outcome ontic_theorems(const Options& opt) {
  std::vector<SingletResource> family{SingletResource::pr_box(), SingletResource::toner_bacon()};
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) family.push_back(SingletResource::general(s));
  bool ok = true;
  double extreme_slack = 0;
  int ensembles = 0;
  for (const auto& res : family) {
    SingletProtocol proto(res, {MeasurementPair::at_angle(degrees_to_radians(45.0))});
    EmbeddingConfig cfg;
    cfg.srx = SrxConfig::newtonian();
    cfg.trials = 4000;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    auto run = embed_and_run(cfg, proto);
    auto rep = ontic_vs_operational_report(run, proto);
    if (!rep.theorems_hold) ok = false;
    for (const auto& l : rep.levels) {
      ++ensembles;
      bool extreme = (l.s_lambda == 1.0 && l.i_lambda == 0.0) || (l.s_lambda == 0.0 && l.i_lambda == 0.5);
      if (extreme) extreme_slack = std::max(extreme_slack, std::fabs(l.complementarity_slack));
    }
    if (res.variant() == SingletVariant::toner_bacon) {
      if (rep.levels[1].s_lambda != 1.0 || rep.levels[1].i_lambda != 0.0) ok = false;
      if (rep.levels[0].s_lambda != 0.0 || rep.levels[0].i_lambda != 0.5) ok = false;
      if (rep.s_lambda_trace != 1.0 || rep.i_lambda_trace != 0.0) ok = false;
    }
  }
  ok = ok && extreme_slack <= 1e-9;
  return {10, "Ontic theorems on the embedded family",
          std::to_string(ensembles) + " ensembles, max |slack| at extremes = " + fmt(extreme_slack),
          "implications hold; slack <= 1e-9 at extremes", 0, 10, ok};
}

template <class F>
Outcome timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o = f();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.seconds > o.budget_seconds) o.pass = false;
  return o;
}

}  // namespace detail

/// Runs the criteria in order, reporting each as it completes.
inline std::vector<Outcome> run(const Options& opt, const std::function<void(const Outcome&)>& on_result = {}) {
  std::vector<Outcome> out;
  std::vector<TrialTally> pr_tallies;
  auto want = [&](int id) { return opt.only == 0 || opt.only == id; };
  auto emit = [&](Outcome o) {
    if (on_result) on_result(o);
    out.push_back(std::move(o));
  };
  if (want(1)) emit(detail::timed([&] { return detail::tables(opt); }));
  if (want(2)) emit(detail::timed([&] { return detail::pr_metrics(opt); }));
  if (want(3)) emit(detail::timed([&] { return detail::freewill_law(opt); }));
  if (want(4)) emit(detail::timed([&] { return detail::partial_mix(opt); }));
  if (want(5)) emit(detail::timed([&] { return detail::decomposition_optimality(opt); }));
  if (want(6)) emit(detail::timed([&] { return detail::complementarity(opt); }));
  if (want(7)) emit(detail::timed([&] { return detail::singlet(opt, &pr_tallies); }));
  if (want(8)) emit(detail::timed([&] { return detail::embedding(opt, pr_tallies); }));
  if (want(9)) emit(detail::timed([&] { return detail::hidden_influence(opt); }));
  if (want(10)) emit(detail::timed([&] { return detail::ontic_theorems(opt); }));
  return out;
}

}  // namespace boxlab::acceptance
