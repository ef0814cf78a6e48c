#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/decomposition.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/numeric.hpp"
#include "boxlab/protocol.hpp"
#include "boxlab/scheme.hpp"

namespace boxlab {

enum class FreewillMode { L, F, LF, Mixed };

inline std::string to_string(FreewillMode m) {
  switch (m) {
    case FreewillMode::L: return "L";
    case FreewillMode::F: return "F";
    case FreewillMode::LF: return "LF";
    case FreewillMode::Mixed: return "Mixed";
  }
  return "L";
}

template <Scalar T>
struct FreewillModel {
  FreewillMode mode;
  T alpha;
  T l;    ///< weight of the 0-bit boxes
  T p_f;  ///< probability of the full-free-will branch
  T free_will;
  T lambda;
  Correlation16<T> correlation;
  std::optional<InputConditioning<T>> conditioning;

  T c_lambda() const { return cost_from_lambda(lambda); }
};

namespace detail {

template <Scalar T>
void ensure(bool ok, const char* what) {
  if (!ok) throw InvariantViolation(what);
}

template <Scalar T>
void check_unit(const T& v, const char* name) {
  if (v < T(0) || v > T(1)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace detail

/// Pure 0-bit mode: the biased scheme over the eight 0-bit boxes with uniform priors.
template <Scalar T>
FreewillModel<T> build_L_mode(const T& alpha) {
  check_alpha(alpha);
  auto cond = biased_conditioning(alpha);
  auto box = operational_box(cond, zero_bit_correlations<T>());
  T f = free_will(cond);
  T lam = chsh_lambda(box);
  detail::ensure<T>(approx_equal(f, (2 + 4 * alpha) / 3), "L mode: F != (2+4 alpha)/3");
  detail::ensure<T>(approx_equal(lam, 4 * (1 - 2 * alpha)), "L mode: Lambda != 4(1-2 alpha)");
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      T expect = 1 - 2 * alpha;
      if ((a & (b ^ 1)) != 0) expect = -expect;
      detail::ensure<T>(approx_equal(correlator(box, a, b), expect), "L mode: correlator mismatch");
    }
  }
  detail::ensure<T>(approx_zero(signaling(box).s), "L mode: operational box signals");
  detail::ensure<T>(membership_oracle(box).member, "L mode: box outside the fragment");
  return {FreewillMode::L, alpha, T(1), T(0), f, lam, box, std::move(cond)};
}

/// Full free will with CHSH value 2 + 2C: C PR + (1 - C) uniform-local.
template <Scalar T>
FreewillModel<T> build_F_mode(const T& c_lambda) {
  detail::check_unit(c_lambda, "C_Lambda");
  std::vector<WeightedBox<T>> parts{{c_lambda, pr_box<T>()}, {T(1) - c_lambda, uniform_local<T>()}};
  auto box = mix(parts);
  T lam = chsh_lambda(box);
  detail::ensure<T>(approx_equal(lam, 2 + 2 * c_lambda), "F mode: Lambda != 2 + 2C");
  return {FreewillMode::F, T(0), T(1) - c_lambda, T(1), T(1), lam, box, std::nullopt};
}

/// Mix of the first four 0-bit boxes weighted by rho(ab|lambda) of the biased scheme.
/// Columns of that sub-table sum to 1 row-wise, so no renormalization is needed.
template <Scalar T>
Correlation16<T> build_partial_L(const std::vector<int>& subset, const T& alpha) {
  std::set<int> got(subset.begin(), subset.end());
  if (got != std::set<int>{0, 1, 2, 3} || subset.size() != 4) {
    throw InvalidArgument("partial mixing is defined for the 0-bit boxes {0,1,2,3} only");
  }
  auto lik = biased_likelihood(alpha);
  std::array<T, 16> e{};
  e.fill(T(0));
  for (int j : subset) {
    auto d = DeterministicBox::zero_bit(j);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        e[box_index(a, b, d.x(a, b), d.y(a, b))] += lik[static_cast<std::size_t>(a * 2 + b)][static_cast<std::size_t>(j)];
      }
    }
  }
  auto box = Correlation16<T>::from_entries(e);
  detail::ensure<T>(approx_equal(signaling(box).s, beta_from_alpha(alpha) - alpha), "partial mix: S != beta - alpha");
  return box;
}

/// 0-bit boxes with total weight l under the biased scheme, 1-bit boxes with
/// weight (1 - l)/8 each, independent of the inputs.
template <Scalar T>
FreewillModel<T> build_LF_mode(const T& alpha, const T& l) {
  check_alpha(alpha);
  detail::check_unit(l, "l");
  auto lik = biased_likelihood(alpha);
  std::vector<typename InputConditioning<T>::Column> post(16);
  for (std::size_t j = 0; j < 8; ++j) {
    for (std::size_t ab = 0; ab < 4; ++ab) {
      post[j][ab] = l * lik[ab][j] / 2;
      post[8 + j][ab] = (1 - l) / 8;
    }
  }
  std::array<T, 4> prior_ab;
  prior_ab.fill(from_ratio<T>(1, 4));
  auto cond = InputConditioning<T>::from_posterior(std::move(post), prior_ab);
  auto boxes = zero_bit_correlations<T>();
  for (auto& b : one_bit_correlations<T>()) boxes.push_back(b);
  auto box = operational_box(cond, boxes);
  T f = free_will(cond);
  T lam = chsh_lambda(box);
  detail::ensure<T>(approx_equal(f, 1 - l * (1 - 4 * alpha) / 3), "LF mode: F != 1 - (l/3)(1 - 4 alpha)");
  detail::ensure<T>(approx_equal(lam, 4 * (1 - 2 * alpha * l)), "LF mode: Lambda != 4(1 - 2 alpha l)");
  detail::ensure<T>(approx_equal(cost_from_lambda(lam), 4 - 3 * f - l), "LF mode: C != 4 - 3F - l");
  detail::ensure<T>(membership_oracle(box).member, "LF mode: box outside the fragment");
  return {FreewillMode::LF, alpha, l, T(1) - l, f, lam, box, std::move(cond)};
}

/// max(0, C - 3(1 - F)): lower bound on S_R + 2 I_R for the communicated resource.
template <Scalar T>
T complementarity_bound(const T& f, const T& c_lambda) {
  T v = c_lambda - 3 * (1 - f);
  return v < T(0) ? T(0) : v;
}

/// Probability of the full-free-will branch that yields average free will F at cost C.
template <Scalar T>
T mixed_mode_pf(const T& f, const T& c_lambda) {
  if (approx_zero(c_lambda)) return T(1);
  return 1 - 3 * (1 - f) / c_lambda;
}

/// p_L P*_L + p_F P_F at a common CHSH value 2 + 2C. The L branch uses
/// alpha = (1 - C)/4 and free will 1 - C/3; the F branch has full free will.
template <Scalar T>
FreewillModel<T> build_mixed_mode(const T& f, const T& c_lambda) {
  detail::check_unit(c_lambda, "C_Lambda");
  detail::check_unit(f, "F");
  if (f < 1 - c_lambda / 3) throw InvalidArgument("F is below 1 - C/3: unreachable by reducing free will alone");
  T pf = mixed_mode_pf(f, c_lambda);
  T pl = 1 - pf;
  T alpha = (1 - c_lambda) / 4;
  auto lmode = build_L_mode(alpha);
  auto fmode = build_F_mode(c_lambda);
  std::vector<WeightedBox<T>> parts{{pl, lmode.correlation}, {pf, fmode.correlation}};
  auto box = mix(parts);
  T lam = chsh_lambda(box);
  detail::ensure<T>(approx_equal(lam, 2 + 2 * c_lambda), "mixed mode: Lambda != 2 + 2C");
  T f_avg = pl * lmode.free_will + pf * fmode.free_will;
  detail::ensure<T>(approx_equal(f_avg, f), "mixed mode: average free will != F");

  // Joint ontology: the L branch's eight biased 0-bit states, then the F
  // branch's eight 0-bit and eight 1-bit states.
  auto lik = biased_likelihood(alpha);
  std::vector<typename InputConditioning<T>::Column> post(24);
  for (std::size_t j = 0; j < 8; ++j) {
    for (std::size_t ab = 0; ab < 4; ++ab) {
      post[j][ab] = pl * lik[ab][j] / 2;
      post[8 + j][ab] = pf * (1 - c_lambda) / 8;
      post[16 + j][ab] = pf * c_lambda / 8;
    }
  }
  std::array<T, 4> prior_ab;
  prior_ab.fill(from_ratio<T>(1, 4));
  auto cond = InputConditioning<T>::from_posterior(std::move(post), prior_ab);
  detail::ensure<T>(approx_equal(free_will(cond), f), "mixed mode: conditioning free will != F");
  auto boxes = zero_bit_correlations<T>();
  for (auto& b : zero_bit_correlations<T>()) boxes.push_back(b);
  for (auto& b : one_bit_correlations<T>()) boxes.push_back(b);
  detail::ensure<T>(approx_equal(operational_box(cond, boxes), box), "mixed mode: ontology does not reproduce box");
  return {FreewillMode::Mixed, alpha, T(1) - pf * c_lambda, pf, f, lam, box, std::move(cond)};
}

/// C = 1 resource family (1+s)/2 d^{0_1} + (1-s)/2 d^{3_1}: S = s, I = (1-s)/2.
template <Scalar T>
Correlation16<T> resource_family(const T& s) {
  detail::check_unit(s, "s");
  std::vector<WeightedBox<T>> parts{{(1 + s) / 2, as_correlation<T>(DeterministicBox::one_bit(0))},
                                    {(1 - s) / 2, as_correlation<T>(DeterministicBox::one_bit(3))}};
  return mix(parts);
}

template <Scalar T>
struct ResourceAccounting {
  T usage;  ///< probability that a trial consumes the communicated resource
  T s_r;
  T i_r;
  T bound;
  T slack;  ///< S_R + 2 I_R - bound
};

/// Signaling and randomness carried by the communicated resource of a model.
/// The resource (a C = 1 box) is consumed with probability `usage`; in all
/// other trials nothing is communicated.
template <Scalar T>
ResourceAccounting<T> resource_accounting(const FreewillModel<T>& model, const Correlation16<T>& resource) {
  if (!approx_equal(chsh_lambda(resource), T(4))) throw InvalidArgument("resource must have CHSH value 4");
  T usage(0);
  switch (model.mode) {
    case FreewillMode::L: usage = T(0); break;
    case FreewillMode::F: usage = model.c_lambda(); break;
    case FreewillMode::LF: usage = 1 - model.l; break;
    case FreewillMode::Mixed: usage = model.p_f * model.c_lambda(); break;
  }
  T s_r = usage * signaling(resource).s;
  T i_r = usage * randomness(resource);
  T bound = complementarity_bound(model.free_will, model.c_lambda());
  return {usage, s_r, i_r, bound, s_r + 2 * i_r - bound};
}

/// Inverse-CDF draw of an index from weights summing to 1.
inline std::size_t inverse_cdf(const double* weights, std::size_t n, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return n - 1;
}

/// Trial-level realization of the mixed-mode protocol.
///
/// chi*_1 selects the branch (full free will with probability p_F). In the
/// reduced branch, chi draws the 0-bit state and chi*_2 draws the inputs from
/// rho(ab|lambda). With the advisory enabled, chi*_2 draws only Alice's input
/// and the advisory R* carries it to Bob, who then leans toward the inputs
/// favoured by the scheme with the configured strength. In the full branch
/// the inputs are free; with probability C a 1-bit box among d^{0_1}..d^{3_1}
/// is used and R = a is sent, otherwise a uniform 0-bit box.
class MixedModeSampler {
 public:
  struct Params {
    double p_f = 1.0;
    double alpha = 0.25;
    double c_lambda = 1.0;
    bool advisory = false;
    double advisory_strength = 1.0;
  };

  explicit MixedModeSampler(Params p) : p_(p) {
    if (p_.p_f < 0 || p_.p_f > 1 || p_.c_lambda < 0 || p_.c_lambda > 1 || p_.alpha < 0 || p_.alpha > 0.25 ||
        p_.advisory_strength < 0 || p_.advisory_strength > 1) {
      throw InvalidArgument("mixed-mode sampler parameters out of range");
    }
    double beta = (1.0 - p_.alpha) / 3.0;
    for (std::size_t ab = 0; ab < 4; ++ab) {
      for (std::size_t j = 0; j < 8; ++j) lik_[j][ab] = kSuppressed[ab][j] ? p_.alpha : beta;
    }
  }

  template <Scalar T>
  static MixedModeSampler from_model(const FreewillModel<T>& m, bool advisory = false, double strength = 1.0) {
    return MixedModeSampler(
        {to_double(m.p_f), to_double(m.alpha), to_double(m.c_lambda()), advisory, strength});
  }

  const Params& params() const { return p_; }

  /// Ontic key layout: bit 5 = full branch, bit 4 = 1-bit box, bits 0..3 = box index.
  AliceHalf alice(const TrialKey& k) const {
    Branch br = branch(k);
    AliceHalf out;
    out.ontic_key = br.key();
    if (!br.full) {
      int a = 0;
      if (p_.advisory) {
        auto rng = k.rng(Stream::chi_star_input);
        double w[2] = {lik_[br.box][0] + lik_[br.box][1], lik_[br.box][2] + lik_[br.box][3]};
        a = static_cast<int>(inverse_cdf(w, 2, rng.uniform()));
        out.message = a;
      } else {
        a = joint_inputs(k, br.box) / 2;
      }
      out.a = a;
      out.x = DeterministicBox::zero_bit(br.box).x(a, 0);
    } else {
      out.a = k.rng(Stream::input_a).bit();
      if (br.one_bit) {
        out.x = DeterministicBox::one_bit(br.box).x(out.a, 0);
        out.message = out.a;
        out.comm_bits = 1;
      } else {
        out.x = DeterministicBox::zero_bit(br.box).x(out.a, 0);
      }
    }
    out.outcome = out.x;
    return out;
  }

  BobHalf bob(const TrialKey& k, std::optional<int> message, BreakdownPolicy policy) const {
    Branch br = branch(k);
    BobHalf out;
    if (!br.full) {
      int b = 0;
      if (p_.advisory) {
        auto rng = k.rng(Stream::chi_star_input);
        rng.next();
        double u = rng.uniform();
        std::size_t j = br.box;
        double marg_b0 = lik_[j][0] + lik_[j][2];  // rho(b=0|lambda)
        double p_b0 = marg_b0;
        if (message) {
          int a = *message;
          double cond_b0 = lik_[j][static_cast<std::size_t>(a * 2)] /
                           (lik_[j][static_cast<std::size_t>(a * 2)] + lik_[j][static_cast<std::size_t>(a * 2 + 1)]);
          p_b0 = p_.advisory_strength * cond_b0 + (1.0 - p_.advisory_strength) * marg_b0;
        } else {
          out.fallback = true;
        }
        b = u < p_b0 ? 0 : 1;
      } else {
        b = joint_inputs(k, br.box) % 2;
      }
      out.b = b;
      out.y = DeterministicBox::zero_bit(br.box).y(0, b);
    } else {
      out.b = k.rng(Stream::input_b).bit();
      if (br.one_bit) {
        auto box = DeterministicBox::one_bit(br.box);
        if (message) {
          out.y = box.y(*message, out.b);
        } else {
          out.fallback = true;
          out.y = fallback_y(k, box, out.b, policy);
        }
      } else {
        out.y = DeterministicBox::zero_bit(br.box).y(0, out.b);
      }
    }
    out.outcome = out.y;
    return out;
  }

 private:
  struct Branch {
    bool full;
    bool one_bit;
    std::size_t box;
    std::uint32_t key() const {
      return (full ? 32u : 0u) | (one_bit ? 16u : 0u) | static_cast<std::uint32_t>(box);
    }
  };

  Branch branch(const TrialKey& k) const {
    bool full = k.rng(Stream::chi_star_mode).bernoulli(p_.p_f);
    auto chi = k.rng(Stream::chi);
    if (!full) return {false, false, static_cast<std::size_t>(chi.below(8))};
    bool one_bit = chi.bernoulli(p_.c_lambda);
    return {true, one_bit, static_cast<std::size_t>(one_bit ? chi.below(4) : chi.below(8))};
  }

  int joint_inputs(const TrialKey& k, std::size_t box) const {
    auto rng = k.rng(Stream::chi_star_input);
    double w[4] = {lik_[box][0], lik_[box][1], lik_[box][2], lik_[box][3]};
    return static_cast<int>(inverse_cdf(w, 4, rng.uniform()));
  }

  static int fallback_y(const TrialKey& k, const DeterministicBox& box, int b, BreakdownPolicy policy) {
    switch (policy) {
      case BreakdownPolicy::local_marginal: {
        // Bob's marginal over a uniform a, drawn from shared randomness.
        int a = k.rng(Stream::box).bit();
        return box.y(a, b);
      }
      case BreakdownPolicy::fair_coin: return k.rng(Stream::bob_local).bit();
      case BreakdownPolicy::default_input: return box.y(0, b);
    }
    return 0;
  }

  Params p_;
  std::array<std::array<double, 4>, 8> lik_{};
};

}  // namespace boxlab
