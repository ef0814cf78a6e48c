#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/freewill.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/parallel.hpp"
#include "boxlab/protocol.hpp"
#include "boxlab/singlet.hpp"

namespace boxlab {

/// Lower bound on the ontic signal speed, in units of c, quoted for
/// quantum-gravity-motivated preferred-frame models. Stored for reference;
/// nothing in the toolkit depends on it.
inline constexpr double kQuantumGravitySpeedBound = 1e61;

/// Ontic signal speed in units of c: a finite value >= 1, or exactly infinite.
class SignalSpeed {
 public:
  static SignalSpeed infinite() { return SignalSpeed(true, 0.0); }
  static SignalSpeed finite(double v) {
    if (!(v >= 1.0) || !std::isfinite(v)) throw InvalidArgument("finite ontic speed must be a number >= 1");
    return SignalSpeed(false, v);
  }

  bool is_infinite() const { return infinite_; }
  /// Finite speed; +inf for the Newtonian case.
  double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : v_; }

  /// v_lambda >= v; an infinite speed dominates every value, including infinity.
  bool at_least(double v) const { return infinite_ || v <= v_; }

  friend bool operator==(const SignalSpeed&, const SignalSpeed&) = default;

 private:
  SignalSpeed(bool inf, double v) : infinite_(inf), v_(v) {}
  bool infinite_;
  double v_;
};

/// Causal structure of the preferred frame, whose coordinates are the identity.
struct SrxConfig {
  SignalSpeed v_lambda = SignalSpeed::infinite();

  static SrxConfig newtonian() { return {SignalSpeed::infinite()}; }
  static SrxConfig special_relativity() { return {SignalSpeed::finite(1.0)}; }

  /// Opening angle with tan(theta) = v_lambda: pi/4 for v = 1, pi/2 for v = infinity.
  double theta_lambda() const {
    return v_lambda.is_infinite() ? std::numbers::pi / 2 : std::atan(v_lambda.value());
  }
};

struct Vec2 {
  double x = 0;
  double y = 0;
};

inline double distance(const Vec2& a, const Vec2& b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct Event {
  double t = 0;
  Vec2 x;
  std::string label;
};

/// |dx| / |dt| between two events: 0 if they coincide, +inf if simultaneous but apart.
inline double experiment_speed(const Event& e1, const Event& e2) {
  double dx = distance(e1.x, e2.x);
  double dt = std::fabs(e2.t - e1.t);
  if (dx == 0.0) return 0.0;
  if (dt == 0.0) return std::numeric_limits<double>::infinity();
  return dx / dt;
}

/// |dx| <= v_lambda |dt| in the preferred frame; always true for infinite v_lambda.
inline bool x_causally_connected(const Event& e1, const Event& e2, const SrxConfig& cfg) {
  if (cfg.v_lambda.is_infinite()) return true;
  return distance(e1.x, e2.x) <= cfg.v_lambda.value() * std::fabs(e2.t - e1.t);
}

/// The special-relativistic light cone: |dx| <= |dt|.
inline bool sr_lightcone_connected(const Event& e1, const Event& e2) {
  return distance(e1.x, e2.x) <= std::fabs(e2.t - e1.t);
}

/// Time orderings of two events seen by two detectors moving along x with
/// velocities u1, u2 (|u| < 1). True when both see the same order.
inline bool detector_frames_agree(const Event& e1, const Event& e2, double u1, double u2) {
  if (std::fabs(u1) >= 1.0 || std::fabs(u2) >= 1.0) throw InvalidArgument("detector speeds must be below c");
  auto order = [&](double u) {
    double dt = (e2.t - e1.t) - u * (e2.x.x - e1.x.x);
    return (dt > 0) - (dt < 0);
  };
  return order(u1) == order(u2);
}

/// A protocol that can run with Alice's and Bob's halves at separate events.
///
/// Bob's half receives Alice's ontic message only if it arrived in time.
/// The exact ontic models feed ontic_vs_operational_report.
class EmbeddableProtocol {
 public:
  virtual ~EmbeddableProtocol() = default;
  virtual std::string name() const = 0;
  virtual std::size_t points() const = 0;
  virtual AliceHalf alice(const TrialKey& k) const = 0;
  virtual BobHalf bob(const TrialKey& k, std::optional<int> message, BreakdownPolicy policy) const = 0;

  /// Conditional boxes per ontic key at the level of the shared strategy choice.
  virtual std::vector<WeightedBox<Rational>> chi_ensemble() const = 0;
  /// Conditional boxes per complete ontic state.
  virtual std::vector<WeightedBox<Rational>> full_ensemble() const = 0;
  /// Operational box at the protocol's input/output interface.
  virtual Correlation16<Rational> operational_model() const = 0;
  /// Inputs are independent of every ontic variable.
  virtual bool full_free_will() const = 0;
};

class SingletProtocol final : public EmbeddableProtocol {
 public:
  SingletProtocol(SingletResource res, std::vector<MeasurementPair> pairs)
      : res_(res), pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw InvalidArgument("singlet protocol needs at least one measurement pair");
  }

  std::string name() const override { return "singlet/" + to_string(res_.variant()); }
  std::size_t points() const override { return pairs_.size(); }
  const std::vector<MeasurementPair>& pairs() const { return pairs_; }
  const SingletResource& resource() const { return res_; }

  AliceHalf alice(const TrialKey& k) const override { return singlet_alice_half(res_, pair(k), k); }
  BobHalf bob(const TrialKey& k, std::optional<int> message, BreakdownPolicy policy) const override {
    return singlet_bob_half(res_, pair(k), k, message, policy);
  }

  std::vector<WeightedBox<Rational>> chi_ensemble() const override { return res_.chi_ensemble<Rational>(); }
  std::vector<WeightedBox<Rational>> full_ensemble() const override { return res_.full_ensemble<Rational>(); }
  Correlation16<Rational> operational_model() const override { return res_.operational_box<Rational>(); }
  bool full_free_will() const override { return true; }

 private:
  const MeasurementPair& pair(const TrialKey& k) const { return pairs_.at(static_cast<std::size_t>(k.point)); }

  SingletResource res_;
  std::vector<MeasurementPair> pairs_;
};

/// Mixed-mode reduced-free-will protocol at one (F, C) point.
class MixedModeProtocol final : public EmbeddableProtocol {
 public:
  MixedModeProtocol(const Rational& f, const Rational& c_lambda, bool advisory = false, double strength = 1.0)
      : model_(build_mixed_mode(f, c_lambda)),
        sampler_(MixedModeSampler::from_model(model_, advisory, strength)) {}

  std::string name() const override { return "mixed-mode"; }
  std::size_t points() const override { return 1; }
  const FreewillModel<Rational>& model() const { return model_; }

  AliceHalf alice(const TrialKey& k) const override { return sampler_.alice(k); }
  BobHalf bob(const TrialKey& k, std::optional<int> message, BreakdownPolicy policy) const override {
    return sampler_.bob(k, message, policy);
  }

  std::vector<WeightedBox<Rational>> chi_ensemble() const override {
    Rational pf = model_.p_f;
    Rational c = model_.c_lambda();
    std::vector<WeightedBox<Rational>> out;
    for (int j = 0; j < 8; ++j) {
      out.emplace_back((1 - pf) / 8 + pf * (1 - c) / 8, as_correlation<Rational>(DeterministicBox::zero_bit(j)));
    }
    for (int j = 0; j < 4; ++j) out.emplace_back(pf * c / 4, as_correlation<Rational>(DeterministicBox::one_bit(j)));
    return out;
  }
  std::vector<WeightedBox<Rational>> full_ensemble() const override { return chi_ensemble(); }
  Correlation16<Rational> operational_model() const override { return model_.correlation; }
  bool full_free_will() const override { return model_.free_will == 1; }

 private:
  FreewillModel<Rational> model_;
  MixedModeSampler sampler_;
};

/// Where each operational column comes from. The operational record may
/// only be assembled from Visible values; Oblivious values live in the trace.
enum class Provenance : std::uint8_t { visible = 0, oblivious = 1 };

template <Provenance P>
struct Tagged {
  int value;
};

using Visible = Tagged<Provenance::visible>;
using Oblivious = Tagged<Provenance::oblivious>;

/// One trial as seen by the experimenters: inputs and outputs only.
struct BaseRecord {
  std::uint32_t point = 0;
  std::uint8_t a = 0, b = 0, x = 0, y = 0;
  std::uint8_t out_a = 0, out_b = 0;
  std::uint8_t provenance_mask = 0;  ///< bit per field sourced from oblivious data; must stay 0

  static BaseRecord make(std::uint32_t point, Visible a, Visible b, Visible x, Visible y, Visible out_a,
                         Visible out_b) {
    BaseRecord r;
    r.point = point;
    r.a = static_cast<std::uint8_t>(a.value);
    r.b = static_cast<std::uint8_t>(b.value);
    r.x = static_cast<std::uint8_t>(x.value);
    r.y = static_cast<std::uint8_t>(y.value);
    r.out_a = static_cast<std::uint8_t>(out_a.value);
    r.out_b = static_cast<std::uint8_t>(out_b.value);
    return r;
  }

  /// Overwrites one field with oblivious data and marks it. Exists for audit tests.
  void leak(int field, Oblivious v) {
    auto val = static_cast<std::uint8_t>(v.value & 1);
    switch (field) {
      case 0: a = val; break;
      case 1: b = val; break;
      case 2: x = val; break;
      case 3: y = val; break;
      case 4: out_a = val; break;
      default: out_b = val; break;
    }
    provenance_mask |= static_cast<std::uint8_t>(1u << field);
  }
};

/// Meta data of one trial: never written to operational outputs.
struct OnticRecord {
  std::uint64_t trial = 0;
  std::uint32_t point = 0;
  std::uint32_t ontic_key = 0;
  bool message_sent = false;
  bool message_delivered = false;
  bool fallback = false;
};

struct EmbeddingConfig {
  SrxConfig srx;
  Event alice{0.0, {0.0, 0.0}, "A"};
  Event bob{1.0, {1.0, 0.0}, "B"};
  std::vector<Event> worldline;  ///< pre-sharing path; its last event must reach both stations
  BreakdownPolicy policy = BreakdownPolicy::local_marginal;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  bool oblivious_strict = true;
  bool keep_records = true;
  unsigned threads = 0;  ///< 0 selects thread_count()
};

struct ObliviousnessAudit {
  std::uint64_t records_scanned = 0;
  std::uint64_t leaked_fields = 0;
  bool clean() const { return leaked_fields == 0; }
};

struct EmbeddingRun {
  std::string protocol;
  EmbeddingConfig config;
  bool relabeled = false;
  double v_exp = 0.0;
  bool condition_holds = true;  ///< v_lambda >= v_exp
  std::vector<TrialTally> tallies;
  std::vector<BaseRecord> base;
  std::vector<OnticRecord> ontic;
  std::uint64_t fallbacks = 0;
  std::uint64_t messages_delivered = 0;
};

/// Scans operational records for fields sourced from oblivious data.
inline ObliviousnessAudit audit_obliviousness(const std::vector<BaseRecord>& records) {
  ObliviousnessAudit a;
  for (const auto& r : records) {
    ++a.records_scanned;
    a.leaked_fields += static_cast<std::uint64_t>(std::popcount(r.provenance_mask));
  }
  return a;
}

/// Runs the protocol with Alice's half at the earlier event and Bob's half at
/// the later one. Alice's message travels at v_lambda; if it arrives after
/// Bob's measurement, Bob follows the breakdown policy.
inline EmbeddingRun embed_and_run(const EmbeddingConfig& cfg_in, const EmbeddableProtocol& proto) {
  if (cfg_in.trials == 0) throw InvalidArgument("trials must be at least 1");
  EmbeddingRun run;
  run.protocol = proto.name();
  run.config = cfg_in;
  auto& cfg = run.config;
  if (cfg.bob.t < cfg.alice.t) {
    std::swap(cfg.alice, cfg.bob);
    run.relabeled = true;
  }
  if (!cfg.worldline.empty()) {
    const Event& w = cfg.worldline.back();
    if (w.t > cfg.alice.t || !x_causally_connected(w, cfg.alice, cfg.srx) ||
        !x_causally_connected(w, cfg.bob, cfg.srx)) {
      throw InvalidArgument("pre-sharing worldline cannot reach both measurement events");
    }
  }
  run.v_exp = experiment_speed(cfg.alice, cfg.bob);
  run.condition_holds = x_causally_connected(cfg.alice, cfg.bob, cfg.srx);
  unsigned threads = cfg.threads == 0 ? thread_count() : cfg.threads;

  struct Acc {
    TrialTally tally;
    std::vector<BaseRecord> base;
    std::vector<OnticRecord> ontic;
    std::uint64_t fallbacks = 0;
    std::uint64_t delivered = 0;
  };

  for (std::size_t p = 0; p < proto.points(); ++p) {
    auto acc = parallel_reduce(
        cfg.trials, threads, Acc{},
        [&](std::uint64_t begin, std::uint64_t end, Acc& out) {
          for (std::uint64_t t = begin; t < end; ++t) {
            TrialKey k{cfg.seed, p, t};
            AliceHalf al = proto.alice(k);
            std::optional<int> msg;
            if (al.message && run.condition_holds) msg = al.message;
            BobHalf bo = proto.bob(k, msg, cfg.policy);
            out.tally.add(al, bo);
            out.fallbacks += bo.fallback ? 1 : 0;
            out.delivered += msg ? 1 : 0;
            if (cfg.keep_records) {
              out.base.push_back(BaseRecord::make(static_cast<std::uint32_t>(p), Visible{al.a}, Visible{bo.b},
                                                  Visible{al.x}, Visible{bo.y}, Visible{al.outcome},
                                                  Visible{bo.outcome}));
              out.ontic.push_back({t, static_cast<std::uint32_t>(p), al.ontic_key, al.message.has_value(),
                                   msg.has_value(), bo.fallback});
            }
          }
        },
        [](Acc& into, Acc& part) {
          into.tally.merge(part.tally);
          into.fallbacks += part.fallbacks;
          into.delivered += part.delivered;
          into.base.insert(into.base.end(), part.base.begin(), part.base.end());
          into.ontic.insert(into.ontic.end(), part.ontic.begin(), part.ontic.end());
        });
    run.tallies.push_back(acc.tally);
    run.fallbacks += acc.fallbacks;
    run.messages_delivered += acc.delivered;
    run.base.insert(run.base.end(), acc.base.begin(), acc.base.end());
    run.ontic.insert(run.ontic.end(), acc.ontic.begin(), acc.ontic.end());
  }
  return run;
}

struct OnticLevelReport {
  std::string ontology;  ///< "trivial", "chi" or "full"
  double s_lambda = 0;
  double i_lambda = 0;
  bool fwt_holds = true;         ///< I_lambda = 0 implies S_lambda > 0
  bool ut_holds = true;          ///< I_lambda < 1/2 implies S_lambda > 0
  double complementarity_slack;  ///< S_lambda + 2 I_lambda - 1
};

struct OntologyReport {
  std::string protocol;
  // Operational level, from base records only.
  double s_model = 0;
  double i_model = 0;
  double s_empirical = 0;
  double i_empirical = 0;
  std::array<double, 4> delta_z{};  ///< |delta_j| / SE_j from base records
  bool zero_signal_consistent = true;
  // Ontic level, from the exact ensembles and from the segregated trace.
  std::vector<OnticLevelReport> levels;
  double s_lambda_trace = 0;
  double i_lambda_trace = 0;
  bool free_will_full = true;
  bool theorems_hold = true;  ///< fwt, ut and complementarity on every level (full free will only)
  ObliviousnessAudit audit;
};

namespace detail {

inline OnticLevelReport level_report(std::string name, const std::vector<WeightedBox<Rational>>& ens) {
  auto m = ontic_metrics(ens);
  OnticLevelReport r;
  r.ontology = std::move(name);
  r.s_lambda = to_double(m.s_lambda);
  r.i_lambda = to_double(m.i_lambda);
  r.fwt_holds = !(m.i_lambda == 0) || m.s_lambda > 0;
  r.ut_holds = !(m.i_lambda < Rational(1, 2)) || m.s_lambda > 0;
  r.complementarity_slack = to_double(m.s_lambda + 2 * m.i_lambda - 1);
  return r;
}

/// Empirical box from counts; unobserved input pairs fall back to uniform outputs.
inline Correlation16<double> empirical_box(const std::array<std::uint64_t, 16>& counts) {
  std::array<double, 16> e{};
  for (std::size_t ab = 0; ab < 4; ++ab) {
    std::uint64_t n = 0;
    for (std::size_t o = 0; o < 4; ++o) n += counts[ab * 4 + o];
    for (std::size_t o = 0; o < 4; ++o) {
      e[ab * 4 + o] = n == 0 ? 0.25 : static_cast<double>(counts[ab * 4 + o]) / static_cast<double>(n);
    }
  }
  return Correlation16<double>::from_entries(e);
}

}  // namespace detail

/// Compares the operational statistics (base records) with the ontic
/// statistics (exact ensembles and the segregated trace).
inline OntologyReport ontic_vs_operational_report(const EmbeddingRun& run, const EmbeddableProtocol& proto) {
  OntologyReport rep;
  rep.protocol = run.protocol;
  auto op = proto.operational_model();
  rep.s_model = to_double(signaling(op).s);
  rep.i_model = to_double(randomness(op));

  std::array<std::uint64_t, 16> counts{};
  for (const auto& t : run.tallies) {
    for (std::size_t i = 0; i < 16; ++i) counts[i] += t.box_counts[i];
  }
  auto emp = detail::empirical_box(counts);
  rep.s_empirical = signaling(emp).s;
  rep.i_empirical = randomness(emp);
  // SE of each marginal difference, from the per-input sample sizes.
  auto n_ab = [&](int a, int b) {
    std::uint64_t n = 0;
    for (int o = 0; o < 4; ++o) n += counts[static_cast<std::size_t>(a * 8 + b * 4 + o)];
    return static_cast<double>(n);
  };
  auto var = [](double p, double n) { return n > 0 ? p * (1 - p) / n : 0.0; };
  auto deltas = signaling_deltas(emp);
  std::array<double, 4> se{
      std::sqrt(var(emp.marginal_y(1, 0, 0), n_ab(1, 0)) + var(emp.marginal_y(0, 0, 0), n_ab(0, 0))),
      std::sqrt(var(emp.marginal_y(0, 1, 0), n_ab(0, 1)) + var(emp.marginal_y(1, 1, 0), n_ab(1, 1))),
      std::sqrt(var(emp.marginal_x(1, 0, 0), n_ab(1, 0)) + var(emp.marginal_x(1, 1, 0), n_ab(1, 1))),
      std::sqrt(var(emp.marginal_x(0, 0, 0), n_ab(0, 0)) + var(emp.marginal_x(0, 1, 0), n_ab(0, 1))),
  };
  for (std::size_t j = 0; j < 4; ++j) {
    double d = std::fabs(deltas[j]);
    rep.delta_z[j] = se[j] > 0 ? d / se[j] : (d == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (rep.delta_z[j] > 4.0) rep.zero_signal_consistent = false;
  }

  rep.free_will_full = proto.full_free_will();
  rep.levels.push_back(detail::level_report("trivial", {{Rational(1), op}}));
  rep.levels.push_back(detail::level_report("chi", proto.chi_ensemble()));
  rep.levels.push_back(detail::level_report("full", proto.full_ensemble()));
  if (rep.free_will_full) {
    for (const auto& l : rep.levels) {
      if (!l.fwt_holds || !l.ut_holds || l.complementarity_slack < -1e-9) rep.theorems_hold = false;
    }
  }

  // Trace-level estimate: per ontic key, the box seen in that key's trials.
  if (!run.ontic.empty() && run.ontic.size() == run.base.size()) {
    std::map<std::uint32_t, std::array<std::uint64_t, 16>> per_key;
    for (std::size_t i = 0; i < run.ontic.size(); ++i) {
      const auto& b = run.base[i];
      ++per_key[run.ontic[i].ontic_key][box_index(b.a, b.b, b.x, b.y)];
    }
    double s = 0, in = 0;
    for (const auto& [key, c] : per_key) {
      auto box = detail::empirical_box(c);
      s = std::max(s, signaling(box).s);
      in = std::max(in, randomness(box));
    }
    rep.s_lambda_trace = s;
    rep.i_lambda_trace = in;
  }
  rep.audit = audit_obliviousness(run.base);
  return rep;
}

struct HieArm {
  bool alice_measures = false;
  std::uint64_t trials = 0;
  std::uint64_t same = 0;
  bool reaches_first = false;
  bool reaches_second = false;

  /// P(same) - P(different).
  double correlation() const {
    return (2.0 * static_cast<double>(same) - static_cast<double>(trials)) / static_cast<double>(trials);
  }
  double correlation_stderr() const { return 2.0 * binomial_stderr(same, trials); }
};

struct HieResult {
  HieArm with_alice;
  HieArm without_alice;
  double v_exp = 0;               ///< L' / (t_B - t_A), L' the distance to each particle
  bool particles_connected = false;
  double signal() const { return std::fabs(with_alice.correlation() - without_alice.correlation()); }
};

struct HieGeometry {
  double distance_l = 10.0;  ///< Alice to the midpoint of Bob's particles
  double separation_r = 1.0;  ///< between Bob's particles
  double t_a = 0.0;
  double t_b = 1.0;
};

/// One arm of the hidden-influence toy model. Alice sits at the origin and
/// Bob's particles at (L, +-R/2), both measured at t_B. A particle reached by
/// Alice's influence outputs her bit; two simultaneously measured particles
/// influence each other only when v_lambda is infinite; otherwise outcomes are
/// independent fair bits.
inline HieArm hidden_influence_arm(const SrxConfig& cfg, const HieGeometry& g, bool alice_measures,
                                   std::uint64_t trials, std::uint64_t seed) {
  if (!(g.distance_l >= 10.0 * g.separation_r) || !(g.separation_r > 0)) {
    throw InvalidArgument("hidden-influence geometry requires R > 0 and L >= 10 R");
  }
  if (!(g.t_b > g.t_a)) throw InvalidArgument("hidden-influence geometry requires t_B > t_A");
  if (trials == 0) throw InvalidArgument("trials must be at least 1");
  Event ea{g.t_a, {0.0, 0.0}, "A"};
  Event b1{g.t_b, {g.distance_l, g.separation_r / 2}, "B1"};
  Event b2{g.t_b, {g.distance_l, -g.separation_r / 2}, "B2"};
  HieArm arm;
  arm.alice_measures = alice_measures;
  arm.trials = trials;
  arm.reaches_first = alice_measures && x_causally_connected(ea, b1, cfg);
  arm.reaches_second = alice_measures && x_causally_connected(ea, b2, cfg);
  bool linked = x_causally_connected(b1, b2, cfg);
  std::uint64_t point = alice_measures ? 1 : 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    TrialKey k{seed, point, t};
    int alice_bit = k.rng(Stream::chi).bit();
    auto local = k.rng(Stream::bob_local);
    int o1 = arm.reaches_first ? alice_bit : local.bit();
    int o2 = arm.reaches_second ? alice_bit : (linked ? o1 : local.bit());
    if (o1 == o2) ++arm.same;
  }
  return arm;
}

inline HieResult hidden_influence_scenario(const SrxConfig& cfg, const HieGeometry& g, std::uint64_t trials,
                                           std::uint64_t seed) {
  HieResult r;
  r.with_alice = hidden_influence_arm(cfg, g, true, trials, seed);
  r.without_alice = hidden_influence_arm(cfg, g, false, trials, seed);
  Event ea{g.t_a, {0.0, 0.0}, "A"};
  Event b1{g.t_b, {g.distance_l, g.separation_r / 2}, "B1"};
  Event b2{g.t_b, {g.distance_l, -g.separation_r / 2}, "B2"};
  r.v_exp = experiment_speed(ea, b1);
  r.particles_connected = x_causally_connected(b1, b2, cfg);
  return r;
}

}  // namespace boxlab
