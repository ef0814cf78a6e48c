#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/parallel.hpp"
#include "boxlab/protocol.hpp"
#include "boxlab/rng.hpp"

namespace boxlab {

/// 0 for m < 0, 1 for m >= 0.
constexpr int sgn(double m) { return m >= 0.0 ? 1 : 0; }

struct MeasurementPair {
  Vec3 n_a;
  Vec3 n_b;

  static MeasurementPair make(const Vec3& a, const Vec3& b) {
    if (std::fabs(norm(a) - 1.0) > 1e-12 || std::fabs(norm(b) - 1.0) > 1e-12) {
      throw InvalidArgument("measurement directions must be unit vectors");
    }
    return {a, b};
  }

  /// n_a = z, n_b rotated by theta (radians) in the x-z plane.
  static MeasurementPair at_angle(double theta) {
    return make({0.0, 0.0, 1.0}, {std::sin(theta), 0.0, std::cos(theta)});
  }

  double target() const { return 0.5 * (1.0 + dot(n_a, n_b)); }
};

/// Shared direction vectors (eta1, eta2), drawn per trial.
struct SharedRandomness {
  Vec3 eta1;
  Vec3 eta2;

  static SharedRandomness draw(const TrialKey& k) {
    auto rng = k.rng(Stream::chi_plus);
    Vec3 e1 = random_unit_vector(rng);
    Vec3 e2 = random_unit_vector(rng);
    return {e1, e2};
  }
};

struct AliceStep {
  int input;    ///< upsilon_A, fed to the box as a
  int box_out;  ///< x
  int outcome;  ///< n_A
};

struct BobStep {
  int input;      ///< upsilon_B
  int box_input;  ///< b = upsilon_B xor 1
  int box_out;    ///< y
  int outcome;    ///< n_B
};

/// upsilon_A = sgn(n.eta1) xor sgn(n.eta2); n_A = x xor sgn(n.eta1).
template <class BoxX>
AliceStep alice_step(const Vec3& n_a, const Vec3& eta1, const Vec3& eta2, BoxX&& box_x) {
  int s1 = sgn(dot(n_a, eta1));
  int ups = s1 ^ sgn(dot(n_a, eta2));
  int x = box_x(ups);
  return {ups, x, x ^ s1};
}

/// upsilon_B = sgn(n.eta+) xor sgn(n.eta-) with eta+- = eta1 +- eta2.
/// The box receives b = upsilon_B xor 1, so x xor y = upsilon_A upsilon_B
/// under the fragment's PR convention x xor y = a (b xor 1).
/// n_B = y xor sgn(n.eta+) xor 1.
template <class BoxY>
BobStep bob_step(const Vec3& n_b, const Vec3& eta1, const Vec3& eta2, BoxY&& box_y) {
  int sp = sgn(dot(n_b, eta1 + eta2));
  int ups = sp ^ sgn(dot(n_b, eta1 - eta2));
  int b = ups ^ 1;
  int y = box_y(b);
  return {ups, b, y, y ^ sp ^ 1};
}

enum class SingletVariant { pr_box, toner_bacon, general };

inline std::string to_string(SingletVariant v) {
  switch (v) {
    case SingletVariant::pr_box: return "prbox";
    case SingletVariant::toner_bacon: return "toner-bacon";
    case SingletVariant::general: return "general";
  }
  return "prbox";
}

/// The C = 1 resource consumed by the singlet protocol.
///
/// Every variant is operationally the PR box. Ontically each trial runs a
/// 1-bit box whose output for Bob needs Alice's input, sent as R = a:
///  - pr_box: chi picks d^{0_1} or d^{3_1}; the protocol charges no bits.
///  - toner_bacon: chi picks one of d^{0_1}..d^{3_1}; one bit charged.
///  - general(s): chi picks r; with probability s the signaling path runs
///    d^{(3r)_1} and charges one bit, else a fresh PR box is used.
class SingletResource {
 public:
  static SingletResource pr_box() { return {SingletVariant::pr_box, 0.0}; }
  static SingletResource toner_bacon() { return {SingletVariant::toner_bacon, 1.0}; }
  static SingletResource general(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("general resource needs s in [0, 1]");
    return {SingletVariant::general, s};
  }

  static SingletResource parse(std::string_view name, double s = 0.5) {
    if (name == "prbox" || name == "pr") return pr_box();
    if (name == "toner-bacon" || name == "tb" || name == "tonerbacon") return toner_bacon();
    if (name == "general") return general(s);
    throw InvalidArgument("unknown singlet variant: " + std::string(name));
  }

  SingletVariant variant() const { return variant_; }
  double s() const { return s_; }

  /// Per-trial ontic state.
  struct Realization {
    int chi_key;       ///< chi-level ontic key
    int box;           ///< 1-bit box index actually run
    bool signaling;    ///< the protocol charges one bit
  };

  Realization realize(const TrialKey& k) const {
    auto chi = k.rng(Stream::chi);
    switch (variant_) {
      case SingletVariant::pr_box: {
        int r = chi.bit();
        return {r, 3 * r, false};
      }
      case SingletVariant::toner_bacon: {
        int j = static_cast<int>(chi.below(4));
        return {j, j, true};
      }
      case SingletVariant::general: {
        int r = chi.bit();
        auto box = k.rng(Stream::box);
        if (box.bernoulli(s_)) return {r, 3 * r, true};
        int q = box.bit();
        return {r, 3 * q, false};
      }
    }
    return {0, 0, false};
  }

  static int alice_x(const Realization& r, int a) { return DeterministicBox::one_bit(r.box).x(a, 0); }

  /// Bob's box output; without the message the breakdown policy decides.
  static int bob_y(const Realization& r, int b, std::optional<int> message, const TrialKey& k,
                   BreakdownPolicy policy) {
    auto box = DeterministicBox::one_bit(r.box);
    if (message) return box.y(*message, b);
    switch (policy) {
      case BreakdownPolicy::local_marginal: {
        // Bob's marginal of the resource is uniform; draw it from shared randomness only.
        auto rng = k.rng(Stream::chi_plus);
        for (int i = 0; i < 4; ++i) rng.next();
        return rng.bit();
      }
      case BreakdownPolicy::fair_coin: return k.rng(Stream::bob_local).bit();
      case BreakdownPolicy::default_input: return box.y(0, b);
    }
    return 0;
  }

  /// Conditional boxes given the chi-level key, with their probabilities.
  template <Scalar T>
  std::vector<WeightedBox<T>> chi_ensemble() const {
    std::vector<WeightedBox<T>> out;
    auto d = [](int j) { return as_correlation<T>(DeterministicBox::one_bit(j)); };
    switch (variant_) {
      case SingletVariant::pr_box:
        out.emplace_back(from_ratio<T>(1, 2), d(0));
        out.emplace_back(from_ratio<T>(1, 2), d(3));
        break;
      case SingletVariant::toner_bacon:
        for (int j = 0; j < 4; ++j) out.emplace_back(from_ratio<T>(1, 4), d(j));
        break;
      case SingletVariant::general: {
        T s = from_double<T>(s_);
        for (int r = 0; r < 2; ++r) {
          std::vector<WeightedBox<T>> parts{{s, d(3 * r)}, {T(1) - s, boxlab::pr_box<T>()}};
          out.emplace_back(from_ratio<T>(1, 2), mix(parts));
        }
        break;
      }
    }
    return out;
  }

  /// Conditional boxes given the full ontic state (chi plus the resource's internal coins).
  template <Scalar T>
  std::vector<WeightedBox<T>> full_ensemble() const {
    std::vector<WeightedBox<T>> out;
    auto d = [](int j) { return as_correlation<T>(DeterministicBox::one_bit(j)); };
    if (variant_ != SingletVariant::general) return chi_ensemble<T>();
    T s = from_double<T>(s_);
    for (int r = 0; r < 2; ++r) {
      out.emplace_back(s / 2, d(3 * r));
      for (int q = 0; q < 2; ++q) out.emplace_back((T(1) - s) / 4, d(3 * q));
    }
    return out;
  }

  template <Scalar T>
  Correlation16<T> operational_box() const {
    return mix(chi_ensemble<T>());
  }

  double comm_bits_per_trial() const { return variant_ == SingletVariant::pr_box ? 0.0 : s_; }

 private:
  SingletResource(SingletVariant v, double s) : variant_(v), s_(s) {}

  SingletVariant variant_;
  double s_;
};

/// Alice's side of one trial: her measurement direction is fixed by the point.
inline AliceHalf singlet_alice_half(const SingletResource& res, const MeasurementPair& m, const TrialKey& k) {
  auto shared = SharedRandomness::draw(k);
  auto real = res.realize(k);
  auto step = alice_step(m.n_a, shared.eta1, shared.eta2, [&](int a) { return SingletResource::alice_x(real, a); });
  AliceHalf out;
  out.a = step.input;
  out.x = step.box_out;
  out.outcome = step.outcome;
  out.message = step.input;
  out.ontic_key = static_cast<std::uint32_t>(real.chi_key);
  out.comm_bits = real.signaling ? 1 : 0;
  return out;
}

inline BobHalf singlet_bob_half(const SingletResource& res, const MeasurementPair& m, const TrialKey& k,
                                std::optional<int> message, BreakdownPolicy policy) {
  auto shared = SharedRandomness::draw(k);
  auto real = res.realize(k);
  bool fallback = !message.has_value();
  auto step = bob_step(m.n_b, shared.eta1, shared.eta2,
                       [&](int b) { return SingletResource::bob_y(real, b, message, k, policy); });
  return {step.box_input, step.box_out, step.outcome, fallback};
}

inline double binomial_stderr(std::uint64_t ones, std::uint64_t n) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(ones) / static_cast<double>(n);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

struct SingletPointStats {
  MeasurementPair pair;
  TrialTally tally;

  double estimate() const { return static_cast<double>(tally.xor_ones) / static_cast<double>(tally.trials); }
  double standard_error() const { return binomial_stderr(tally.xor_ones, tally.trials); }
  double target() const { return pair.target(); }
  double marginal_a() const { return static_cast<double>(tally.a_ones) / static_cast<double>(tally.trials); }
  double marginal_b() const { return static_cast<double>(tally.b_ones) / static_cast<double>(tally.trials); }
  double marginal_a_stderr() const { return binomial_stderr(tally.a_ones, tally.trials); }
  double marginal_b_stderr() const { return binomial_stderr(tally.b_ones, tally.trials); }
  double comm_bits_per_trial() const {
    return static_cast<double>(tally.comm_bits) / static_cast<double>(tally.trials);
  }

  /// |estimate - target| <= k SE; a zero SE demands exact agreement.
  bool within(double k) const { return std::fabs(estimate() - target()) <= k * standard_error() + 1e-12; }
  bool marginals_within(double k) const {
    return std::fabs(marginal_a() - 0.5) <= k * marginal_a_stderr() + 1e-12 &&
           std::fabs(marginal_b() - 0.5) <= k * marginal_b_stderr() + 1e-12;
  }
};

/// Estimates <n_A xor n_B> for each measurement pair with fresh shared randomness per trial.
inline std::vector<SingletPointStats> run_singlet_sim(const SingletResource& res,
                                                      const std::vector<MeasurementPair>& pairs,
                                                      std::uint64_t trials, std::uint64_t seed,
                                                      unsigned threads = thread_count()) {
  if (trials == 0) throw InvalidArgument("trials must be at least 1");
  std::vector<SingletPointStats> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& m = pairs[p];
    auto tally = parallel_reduce(
        trials, threads, TrialTally{},
        [&](std::uint64_t begin, std::uint64_t end, TrialTally& acc) {
          for (std::uint64_t t = begin; t < end; ++t) {
            TrialKey k{seed, p, t};
            auto al = singlet_alice_half(res, m, k);
            auto bo = singlet_bob_half(res, m, k, al.message, BreakdownPolicy::local_marginal);
            acc.add(al, bo);
          }
        },
        [](TrialTally& acc, const TrialTally& part) { acc.merge(part); });
    out.push_back({m, tally});
  }
  return out;
}

/// theta = 0, 15, ..., 165 degrees.
inline std::vector<double> default_theta_grid_degrees() {
  std::vector<double> g;
  for (int i = 0; i < 12; ++i) g.push_back(15.0 * i);
  return g;
}

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace boxlab
