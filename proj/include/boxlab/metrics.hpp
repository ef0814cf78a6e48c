#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/numeric.hpp"

namespace boxlab {

/// Operational signaling of a box. The four deltas are the no-signaling
/// violations for the input pairs (b=0: A->B), (b=1: A->B), (a=1: B->A),
/// (a=0: B->A), in that order.
template <Scalar T>
struct SignalReport {
  T s_a_to_b;
  T s_b_to_a;
  T s;
  std::array<T, 4> deltas;
};

template <Scalar T>
std::array<T, 4> signaling_deltas(const Correlation16<T>& p) {
  return {
      p.marginal_y(1, 0, 0) - p.marginal_y(0, 0, 0),
      p.marginal_y(0, 1, 0) - p.marginal_y(1, 1, 0),
      p.marginal_x(1, 0, 0) - p.marginal_x(1, 1, 0),
      p.marginal_x(0, 0, 0) - p.marginal_x(0, 1, 0),
  };
}

template <Scalar T>
T max_of(const T& a, const T& b) {
  return a < b ? b : a;
}

/// Supremum of marginal changes: S^{A->B} over Bob's input, S^{B->A} over
/// Alice's input, and S as the larger of the two.
template <Scalar T>
SignalReport<T> signaling(const Correlation16<T>& p) {
  T a_to_b(0);
  for (int b = 0; b < 2; ++b) {
    for (int y = 0; y < 2; ++y) {
      a_to_b = max_of(a_to_b, abs_value<T>(p.marginal_y(0, b, y) - p.marginal_y(1, b, y)));
    }
  }
  T b_to_a(0);
  for (int a = 0; a < 2; ++a) {
    for (int x = 0; x < 2; ++x) {
      b_to_a = max_of(b_to_a, abs_value<T>(p.marginal_x(a, 0, x) - p.marginal_x(a, 1, x)));
    }
  }
  return {a_to_b, b_to_a, max_of(a_to_b, b_to_a), signaling_deltas(p)};
}

/// max_j |delta_j|; equal to signaling(p).s on every box.
template <Scalar T>
T signal_from_deltas(const std::array<T, 4>& deltas) {
  T s(0);
  for (const T& d : deltas) s = max_of(s, abs_value<T>(d));
  return s;
}

/// Local randomness: sup over inputs and over both parties of the smaller
/// single-party outcome probability. In [0, 1/2].
template <Scalar T>
T randomness(const Correlation16<T>& p) {
  T best(0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      T px0 = p.marginal_x(a, b, 0);
      T px1 = p.marginal_x(a, b, 1);
      T py0 = p.marginal_y(a, b, 0);
      T py1 = p.marginal_y(a, b, 1);
      best = max_of(best, px0 < px1 ? px0 : px1);
      best = max_of(best, py0 < py1 ? py0 : py1);
    }
  }
  return best;
}

template <Scalar T>
struct OnticMetrics {
  T s_lambda;
  T i_lambda;
};

/// Worst case over ontic states with positive weight: S_lambda is the
/// largest per-state signal, I_lambda the largest per-state randomness.
template <Scalar T>
OnticMetrics<T> ontic_metrics(const std::vector<WeightedBox<T>>& ensemble) {
  if (ensemble.empty()) throw InvalidArgument("ontic ensemble is empty");
  std::vector<T> weights;
  for (const auto& m : ensemble) weights.push_back(m.first);
  validate_weights<T>(weights);
  OnticMetrics<T> out{T(0), T(0)};
  for (const auto& [w, box] : ensemble) {
    if (approx_zero(w)) continue;
    out.s_lambda = max_of(out.s_lambda, signaling(box).s);
    out.i_lambda = max_of(out.i_lambda, randomness(box));
  }
  return out;
}

/// Weight-averaged counterpart of ontic_metrics. Reported, never used by acceptance.
template <Scalar T>
OnticMetrics<T> ontic_metrics_averaged(const std::vector<WeightedBox<T>>& ensemble) {
  if (ensemble.empty()) throw InvalidArgument("ontic ensemble is empty");
  std::vector<T> weights;
  for (const auto& m : ensemble) weights.push_back(m.first);
  validate_weights<T>(weights);
  OnticMetrics<T> out{T(0), T(0)};
  for (const auto& [w, box] : ensemble) {
    out.s_lambda += w * signaling(box).s;
    out.i_lambda += w * randomness(box);
  }
  return out;
}

/// Joint description of how input choices depend on the ontic state.
///
/// Rows are the inputs ab = 00, 01, 10, 11; columns are ontic states. The
/// forward matrix rho(ab|lambda) and the posterior rho(lambda|ab) are tied
/// by Bayes' rule through explicit priors, which are stored, never implied.
template <Scalar T>
class InputConditioning {
 public:
  using Column = std::array<T, 4>;

  /// From rho(ab|lambda) and a prior over lambda; P(ab) is the induced marginal.
  static InputConditioning from_likelihood(std::vector<Column> ab_given_lambda, std::vector<T> prior_lambda) {
    if (ab_given_lambda.empty() || ab_given_lambda.size() != prior_lambda.size()) {
      throw InvalidArgument("conditioning needs one prior weight per ontic state");
    }
    validate_weights<T>(prior_lambda);
    for (const auto& col : ab_given_lambda) validate_weights<T>(std::span<const T>(col));
    std::array<T, 4> prior_ab{};
    prior_ab.fill(T(0));
    for (std::size_t l = 0; l < prior_lambda.size(); ++l) {
      for (std::size_t r = 0; r < 4; ++r) prior_ab[r] += ab_given_lambda[l][r] * prior_lambda[l];
    }
    std::vector<Column> lambda_given_ab(prior_lambda.size());
    for (std::size_t l = 0; l < prior_lambda.size(); ++l) {
      for (std::size_t r = 0; r < 4; ++r) {
        lambda_given_ab[l][r] =
            approx_zero(prior_ab[r]) ? T(0) : ab_given_lambda[l][r] * prior_lambda[l] / prior_ab[r];
      }
    }
    return InputConditioning(std::move(ab_given_lambda), std::move(lambda_given_ab), std::move(prior_lambda),
                             prior_ab);
  }

  /// As from_likelihood, additionally checking a stated input prior against the induced one.
  static InputConditioning from_likelihood(std::vector<Column> ab_given_lambda, std::vector<T> prior_lambda,
                                           const std::array<T, 4>& stated_prior_ab) {
    auto out = from_likelihood(std::move(ab_given_lambda), std::move(prior_lambda));
    for (std::size_t r = 0; r < 4; ++r) {
      if (!approx_equal(out.prior_ab_[r], stated_prior_ab[r])) {
        throw InvalidArgument("stated input prior is not Bayes-consistent with the conditioning");
      }
    }
    return out;
  }

  /// From rho(lambda|ab) (one column per ontic state, indexed by ab) and a prior over inputs.
  /// Ontic states with zero prior get a likelihood equal to the input prior.
  static InputConditioning from_posterior(std::vector<Column> lambda_given_ab, const std::array<T, 4>& prior_ab) {
    if (lambda_given_ab.empty()) throw InvalidArgument("conditioning needs at least one ontic state");
    validate_weights<T>(std::span<const T>(prior_ab));
    for (std::size_t r = 0; r < 4; ++r) {
      T sum(0);
      for (const auto& col : lambda_given_ab) {
        if (!approx_geq(col[r], T(0))) throw InvalidArgument("posterior entries must be nonnegative");
        sum += col[r];
      }
      if (!approx_equal(sum, T(1))) throw InvalidArgument("posterior rho(lambda|ab) must sum to 1 per input");
    }
    std::vector<T> prior_lambda(lambda_given_ab.size(), T(0));
    for (std::size_t l = 0; l < lambda_given_ab.size(); ++l) {
      for (std::size_t r = 0; r < 4; ++r) prior_lambda[l] += lambda_given_ab[l][r] * prior_ab[r];
    }
    std::vector<Column> ab_given_lambda(lambda_given_ab.size());
    for (std::size_t l = 0; l < lambda_given_ab.size(); ++l) {
      for (std::size_t r = 0; r < 4; ++r) {
        ab_given_lambda[l][r] = approx_zero(prior_lambda[l])
                                    ? prior_ab[r]
                                    : lambda_given_ab[l][r] * prior_ab[r] / prior_lambda[l];
      }
    }
    return InputConditioning(std::move(ab_given_lambda), std::move(lambda_given_ab), std::move(prior_lambda),
                             prior_ab);
  }

  std::size_t states() const { return prior_lambda_.size(); }
  const T& ab_given_lambda(std::size_t ab, std::size_t lambda) const { return ab_given_lambda_[lambda][ab]; }
  const T& lambda_given_ab(std::size_t lambda, std::size_t ab) const { return lambda_given_ab_[lambda][ab]; }
  const std::vector<T>& prior_lambda() const { return prior_lambda_; }
  const std::array<T, 4>& prior_ab() const { return prior_ab_; }

  /// rho(lambda|ab) * P(ab) == rho(ab|lambda) * P(lambda) entrywise.
  bool bayes_consistent() const {
    for (std::size_t l = 0; l < states(); ++l) {
      for (std::size_t r = 0; r < 4; ++r) {
        if (!approx_equal(lambda_given_ab_[l][r] * prior_ab_[r], ab_given_lambda_[l][r] * prior_lambda_[l])) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  InputConditioning(std::vector<Column> fwd, std::vector<Column> post, std::vector<T> prior_lambda,
                    std::array<T, 4> prior_ab)
      : ab_given_lambda_(std::move(fwd)),
        lambda_given_ab_(std::move(post)),
        prior_lambda_(std::move(prior_lambda)),
        prior_ab_(std::move(prior_ab)) {}

  std::vector<Column> ab_given_lambda_;
  std::vector<Column> lambda_given_ab_;
  std::vector<T> prior_lambda_;
  std::array<T, 4> prior_ab_;
};

/// F = 1 - (1/2) max over input pairs of sum_lambda |rho(lambda|ab) - rho(lambda|a'b')|.
/// Input pairs with zero prior are excluded from the scan.
template <Scalar T>
T free_will(const InputConditioning<T>& cond) {
  if (!cond.bayes_consistent()) throw InvalidArgument("conditioning is not Bayes-consistent");
  T worst(0);
  for (std::size_t r1 = 0; r1 < 4; ++r1) {
    if (approx_zero(cond.prior_ab()[r1])) continue;
    for (std::size_t r2 = r1 + 1; r2 < 4; ++r2) {
      if (approx_zero(cond.prior_ab()[r2])) continue;
      T dist(0);
      for (std::size_t l = 0; l < cond.states(); ++l) {
        dist += abs_value<T>(cond.lambda_given_ab(l, r1) - cond.lambda_given_ab(l, r2));
      }
      worst = max_of(worst, dist);
    }
  }
  return T(1) - worst / 2;
}

template <Scalar T>
struct TelepathyReport {
  std::array<T, 4> joint;         ///< P(A=a, B=b) at index a*2+b.
  std::array<T, 2> marginal_a;
  std::array<T, 2> marginal_b;
  /// P(B=b | A=a) at [a][b]; empty when P(A=a) = 0.
  std::array<std::optional<std::array<T, 2>>, 2> b_given_a;
  bool dependent;
};

/// Input statistics at one fixed ontic state: flags Bob's input leaking into Alice's.
template <Scalar T>
TelepathyReport<T> telepathy_check(const InputConditioning<T>& cond, std::size_t lambda) {
  if (lambda >= cond.states()) throw InvalidArgument("ontic state index out of range");
  TelepathyReport<T> rep{};
  for (std::size_t r = 0; r < 4; ++r) rep.joint[r] = cond.ab_given_lambda(r, lambda);
  rep.marginal_a = {rep.joint[0] + rep.joint[1], rep.joint[2] + rep.joint[3]};
  rep.marginal_b = {rep.joint[0] + rep.joint[2], rep.joint[1] + rep.joint[3]};
  rep.dependent = false;
  for (std::size_t a = 0; a < 2; ++a) {
    if (approx_zero(rep.marginal_a[a])) continue;
    std::array<T, 2> cond_b{rep.joint[a * 2] / rep.marginal_a[a], rep.joint[a * 2 + 1] / rep.marginal_a[a]};
    for (std::size_t b = 0; b < 2; ++b) {
      if (!approx_equal(cond_b[b], rep.marginal_b[b])) rep.dependent = true;
    }
    rep.b_given_a[a] = cond_b;
  }
  return rep;
}

/// Full joint distribution P(a, b, x, y), stored in the box index order.
template <Scalar T>
class JointDistribution {
 public:
  static JointDistribution from_entries(std::array<T, 16> entries) {
    validate_weights<T>(std::span<const T>(entries));
    return JointDistribution(std::move(entries));
  }

  /// P(a,b,x,y) = P(ab) P(xy|ab).
  static JointDistribution from_inputs_and_box(const std::array<T, 4>& prior_ab, const Correlation16<T>& box) {
    std::array<T, 16> e{};
    for (std::size_t i = 0; i < 16; ++i) e[i] = prior_ab[i / 4] * box[i];
    return from_entries(e);
  }

  /// Sum over ontic states of P(lambda) rho(ab|lambda) d_lambda(xy|ab).
  static JointDistribution from_conditioning(const InputConditioning<T>& cond,
                                             const std::vector<Correlation16<T>>& ontic_boxes) {
    if (ontic_boxes.size() != cond.states()) throw InvalidArgument("one box per ontic state required");
    std::array<T, 16> e{};
    e.fill(T(0));
    for (std::size_t l = 0; l < cond.states(); ++l) {
      for (std::size_t i = 0; i < 16; ++i) {
        e[i] += cond.prior_lambda()[l] * cond.ab_given_lambda(i / 4, l) * ontic_boxes[l][i];
      }
    }
    return from_entries(e);
  }

  const T& operator()(int a, int b, int x, int y) const { return p_[box_index(a, b, x, y)]; }
  const T& operator[](std::size_t i) const { return p_[i]; }

  T input_probability(int a, int b) const {
    T s(0);
    for (int o = 0; o < 4; ++o) s += p_[static_cast<std::size_t>(a * 8 + b * 4 + o)];
    return s;
  }

  /// P(xy|ab); empty if some input pair never occurs.
  std::optional<Correlation16<T>> conditional_box() const {
    std::array<T, 16> e{};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        T pab = input_probability(a, b);
        if (approx_zero(pab)) return std::nullopt;
        for (int o = 0; o < 4; ++o) {
          auto i = static_cast<std::size_t>(a * 8 + b * 4 + o);
          e[i] = p_[i] / pab;
        }
      }
    }
    return Correlation16<T>::from_entries(e);
  }

 private:
  explicit JointDistribution(std::array<T, 16> p) : p_(std::move(p)) {}
  std::array<T, 16> p_;
};

/// Spontaneity: P(A | B, Y) = P(A) and P(B | A, X) = P(B), skipping
/// conditioning events of zero probability. When it holds, the induced
/// box is cross-checked to be operationally non-signaling.
template <Scalar T>
bool spontaneity_check(const JointDistribution<T>& joint) {
  std::array<T, 2> pa{T(0), T(0)};
  std::array<T, 2> pb{T(0), T(0)};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      pa[a] += joint.input_probability(a, b);
      pb[b] += joint.input_probability(a, b);
    }
  }
  bool spontaneous = true;
  // P(A | B=b, Y=y)
  for (int b = 0; b < 2 && spontaneous; ++b) {
    for (int y = 0; y < 2 && spontaneous; ++y) {
      std::array<T, 2> pa_by{T(0), T(0)};
      for (int a = 0; a < 2; ++a) {
        for (int x = 0; x < 2; ++x) pa_by[a] += joint(a, b, x, y);
      }
      T pby = pa_by[0] + pa_by[1];
      if (approx_zero(pby)) continue;
      for (int a = 0; a < 2; ++a) {
        if (!approx_equal(pa_by[a] / pby, pa[a])) spontaneous = false;
      }
    }
  }
  // P(B | A=a, X=x)
  for (int a = 0; a < 2 && spontaneous; ++a) {
    for (int x = 0; x < 2 && spontaneous; ++x) {
      std::array<T, 2> pb_ax{T(0), T(0)};
      for (int b = 0; b < 2; ++b) {
        for (int y = 0; y < 2; ++y) pb_ax[b] += joint(a, b, x, y);
      }
      T pax = pb_ax[0] + pb_ax[1];
      if (approx_zero(pax)) continue;
      for (int b = 0; b < 2; ++b) {
        if (!approx_equal(pb_ax[b] / pax, pb[b])) spontaneous = false;
      }
    }
  }
  if (spontaneous) {
    if (auto box = joint.conditional_box(); box && !approx_zero(signaling(*box).s)) {
      throw InvariantViolation("spontaneous joint induced a signaling box");
    }
  }
  return spontaneous;
}

}  // namespace boxlab
