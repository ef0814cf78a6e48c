#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/lp.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/numeric.hpp"
#include "boxlab/scheme.hpp"

namespace boxlab {

/// Nonnegative weights over the sixteen extreme boxes of the fragment.
template <Scalar T>
struct Decomposition {
  std::array<T, 8> p0;
  std::array<T, 8> p1;

  T p0_total() const {
    T s(0);
    for (const T& v : p0) s += v;
    return s;
  }
  T p1_total() const {
    T s(0);
    for (const T& v : p1) s += v;
    return s;
  }

  Correlation16<T> correlation() const {
    std::vector<WeightedBox<T>> parts;
    for (int j = 0; j < 8; ++j) {
      parts.emplace_back(p0[static_cast<std::size_t>(j)], as_correlation<T>(DeterministicBox::zero_bit(j)));
    }
    for (int j = 0; j < 8; ++j) {
      parts.emplace_back(p1[static_cast<std::size_t>(j)], as_correlation<T>(DeterministicBox::one_bit(j)));
    }
    return mix(parts);
  }

  /// Flat view in the canonical order: 0-bit weights, then 1-bit weights.
  std::array<T, 16> flat() const {
    std::array<T, 16> out{};
    for (std::size_t j = 0; j < 8; ++j) {
      out[j] = p0[j];
      out[8 + j] = p1[j];
    }
    return out;
  }
};

template <Scalar T>
struct CostCertificate {
  T c_lambda;
  T p1_total;
  T lp_min_p1;
  std::array<T, 4> deltas;
  bool optimal;
};

/// The cell (ab, xy) at which 0-bit box j disagrees with the sign of the
/// CHSH term; every other extreme box is zero there, so P at that cell is p^0_j.
inline constexpr std::array<std::size_t, 8> kZeroBitWitnessCell{
    box_index(1, 0, 0, 0),  // j=0
    box_index(1, 1, 1, 0),  // j=1
    box_index(0, 0, 0, 1),  // j=2
    box_index(0, 1, 1, 0),  // j=3
    box_index(0, 1, 0, 1),  // j=4
    box_index(0, 0, 1, 0),  // j=5
    box_index(1, 1, 0, 1),  // j=6
    box_index(1, 0, 1, 1),  // j=7
};

/// Free parameters of the 1-bit weights: (p^1_0, p^1_1, p^1_4).
template <Scalar T>
struct FreeParams {
  T p1_0;
  T p1_1;
  T p1_4;
};

namespace detail {

/// Pair k couples base weight t_k with partner t_k + delta_k:
/// (p^1_0, p^1_3), (p^1_1, p^1_2), (p^1_4, p^1_7), (p^1_5, p^1_6).
inline constexpr std::array<std::size_t, 4> kPairBase{0, 1, 4, 5};
inline constexpr std::array<std::size_t, 4> kPairPartner{3, 2, 7, 6};

template <Scalar T>
std::array<T, 8> expand_pairs(const std::array<T, 4>& base, const std::array<T, 4>& deltas) {
  std::array<T, 8> p1{};
  for (std::size_t k = 0; k < 4; ++k) {
    p1[kPairBase[k]] = base[k];
    p1[kPairPartner[k]] = base[k] + deltas[k];
  }
  return p1;
}

/// Minimizes sum_k t_k^2 + (t_k + d_k)^2 subject to sum_k t_k = u and
/// t_k >= L_k = max(0, -d_k). Stationarity gives t_k = max(L_k, mu/4 - d_k/2);
/// the multiplier mu is found exactly on the sorted breakpoints 4 L_k + 2 d_k.
template <Scalar T>
std::optional<std::array<T, 4>> water_fill(const T& u, const std::array<T, 4>& d) {
  std::array<T, 4> lower{};
  T lower_sum(0);
  for (std::size_t k = 0; k < 4; ++k) {
    lower[k] = d[k] < T(0) ? T(-d[k]) : T(0);
    lower_sum += lower[k];
  }
  if (definitely_greater(lower_sum, u)) return std::nullopt;

  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::array<T, 4> breakpoint{};
  for (std::size_t k = 0; k < 4; ++k) breakpoint[k] = 4 * lower[k] + 2 * d[k];
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return breakpoint[l] < breakpoint[r]; });

  T clamped_sum = lower_sum;
  T active_delta(0);
  for (std::size_t m = 1; m <= 4; ++m) {
    std::size_t k = order[m - 1];
    clamped_sum -= lower[k];
    active_delta += d[k];
    T mu = (4 * (u - clamped_sum) + 2 * active_delta) / T(static_cast<int>(m));
    bool above = !(mu < breakpoint[k]);
    bool below = m == 4 || !(breakpoint[order[m]] < mu);
    if (above && below) {
      std::array<T, 4> t{};
      for (std::size_t q = 0; q < 4; ++q) {
        T free_t = mu / 4 - d[q] / 2;
        t[q] = free_t < lower[q] ? lower[q] : free_t;
      }
      return t;
    }
  }
  return std::nullopt;
}

template <Scalar T>
void require_fragment_range(const Correlation16<T>& p) {
  if (definitely_greater(T(2), chsh_lambda(p))) {
    throw OutOfFragment("CHSH value below 2: box lies outside the fragment");
  }
}

template <Scalar T>
Decomposition<T> finish(const Correlation16<T>& p, std::array<T, 8> p0, std::array<T, 8> p1) {
  for (const T& v : p1) {
    if (!approx_geq(v, T(0))) throw NotInFragment("no nonnegative 1-bit weights satisfy the constraints");
  }
  Decomposition<T> d{std::move(p0), std::move(p1)};
  if (!approx_equal(d.p0_total() + d.p1_total(), T(1))) {
    throw NotInFragment("decomposition weights do not sum to 1");
  }
  std::array<T, 16> e{};
  e.fill(T(0));
  auto flat = d.flat();
  auto boxes = extreme_boxes();
  for (std::size_t k = 0; k < 16; ++k) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) e[box_index(a, b, boxes[k].x(a, b), boxes[k].y(a, b))] += flat[k];
    }
  }
  for (std::size_t i = 0; i < 16; ++i) {
    if (!approx_equal(e[i], p[i])) throw NotInFragment("extreme boxes do not reproduce the input box");
  }
  return d;
}

template <Scalar T>
std::array<T, 8> forced_zero_bit_weights(const Correlation16<T>& p) {
  std::array<T, 8> p0{};
  for (std::size_t j = 0; j < 8; ++j) p0[j] = p[kZeroBitWitnessCell[j]];
  return p0;
}

}  // namespace detail

/// Decomposes p into the sixteen extreme boxes. The 0-bit weights are read
/// off directly; the 1-bit weights satisfy sum = Lambda/2 - 1 and the four
/// signaling constraints, with the remaining freedom fixed by minimizing
/// sum_j (p^1_j)^2.
template <Scalar T>
Decomposition<T> construct_decomposition(const Correlation16<T>& p) {
  detail::require_fragment_range(p);
  auto p0 = detail::forced_zero_bit_weights(p);
  auto deltas = signaling_deltas(p);
  T c = cost_from_lambda(chsh_lambda(p));
  T delta_sum = deltas[0] + deltas[1] + deltas[2] + deltas[3];
  auto base = detail::water_fill<T>((c - delta_sum) / 2, deltas);
  if (!base) throw NotInFragment("no nonnegative 1-bit weights satisfy the constraints");
  return detail::finish(p, std::move(p0), detail::expand_pairs(*base, deltas));
}

/// As above with the three free 1-bit weights fixed explicitly.
template <Scalar T>
Decomposition<T> construct_decomposition(const Correlation16<T>& p, const FreeParams<T>& free) {
  detail::require_fragment_range(p);
  auto p0 = detail::forced_zero_bit_weights(p);
  auto deltas = signaling_deltas(p);
  T c = cost_from_lambda(chsh_lambda(p));
  T delta_sum = deltas[0] + deltas[1] + deltas[2] + deltas[3];
  T u = (c - delta_sum) / 2;
  std::array<T, 4> base{free.p1_0, free.p1_1, free.p1_4, u - free.p1_0 - free.p1_1 - free.p1_4};
  return detail::finish(p, std::move(p0), detail::expand_pairs(base, deltas));
}

template <Scalar T>
struct MembershipResult {
  bool member;
  std::optional<Decomposition<T>> witness;
};

namespace detail {

template <Scalar T>
lp::Result<T> fragment_lp(const Correlation16<T>& p, bool minimize_p1) {
  auto boxes = extreme_boxes();
  std::vector<std::vector<T>> a(16, std::vector<T>(16, T(0)));
  std::vector<T> b(16);
  for (std::size_t k = 0; k < 16; ++k) {
    for (int ia = 0; ia < 2; ++ia) {
      for (int ib = 0; ib < 2; ++ib) a[box_index(ia, ib, boxes[k].x(ia, ib), boxes[k].y(ia, ib))][k] = T(1);
    }
  }
  for (std::size_t i = 0; i < 16; ++i) b[i] = p[i];
  std::vector<T> c(16, T(0));
  if (minimize_p1) {
    for (std::size_t k = 8; k < 16; ++k) c[k] = T(1);
  }
  return lp::minimize(std::move(a), std::move(b), std::move(c));
}

template <Scalar T>
Decomposition<T> from_flat(const std::vector<T>& x) {
  Decomposition<T> d{};
  for (std::size_t j = 0; j < 8; ++j) {
    d.p0[j] = x[j];
    d.p1[j] = x[8 + j];
  }
  return d;
}

}  // namespace detail

/// Exact feasibility of p = sum_k w_k d_k with w >= 0 over the sixteen extreme boxes.
template <Scalar T>
MembershipResult<T> membership_oracle(const Correlation16<T>& p) {
  auto res = detail::fragment_lp(p, false);
  if (res.status != lp::Status::optimal) return {false, std::nullopt};
  return {true, detail::from_flat(res.x)};
}

/// Minimum of sum_j p^1_j over all decompositions, or empty if p is outside the fragment.
template <Scalar T>
std::optional<T> min_one_bit_weight(const Correlation16<T>& p) {
  auto res = detail::fragment_lp(p, true);
  if (res.status != lp::Status::optimal) return std::nullopt;
  return res.objective;
}

/// Cost certificate: the constructed decomposition's 1-bit weight against
/// Lambda/2 - 1 and against the independent LP minimum.
template <Scalar T>
CostCertificate<T> communication_cost(const Correlation16<T>& p) {
  if (!membership_oracle(p).member) throw NotInFragment("box is not a convex mixture of the extreme boxes");
  auto d = construct_decomposition(p);
  auto lp_min = min_one_bit_weight(p);
  if (!lp_min) throw InvariantViolation("LP disagrees with membership oracle");
  T c = cost_from_lambda(chsh_lambda(p));
  T p1 = d.p1_total();
  T target = c < T(0) ? T(0) : c;
  bool optimal = approx_equal(p1, target) && approx_equal(*lp_min, p1);
  return {c, p1, *lp_min, signaling_deltas(p), optimal};
}

/// rho(ab|lambda) = 4 alpha rho0 + (1 - 4 alpha) rho* for the biased scheme.
template <Scalar T>
struct InputModelSplit {
  T weight_local;
  T weight_star;
  std::array<std::array<T, 8>, 4> rho0;
  std::array<std::array<T, 8>, 4> rho_star;
};

template <Scalar T>
InputModelSplit<T> decompose_input_model(const T& alpha) {
  check_alpha(alpha);
  InputModelSplit<T> out{};
  out.weight_local = 4 * alpha;
  out.weight_star = T(1) - 4 * alpha;
  for (std::size_t ab = 0; ab < 4; ++ab) {
    for (std::size_t j = 0; j < 8; ++j) {
      out.rho0[ab][j] = from_ratio<T>(1, 4);
      out.rho_star[ab][j] = kSuppressed[ab][j] ? T(0) : from_ratio<T>(1, 3);
    }
  }
  auto lik = biased_likelihood(alpha);
  for (std::size_t ab = 0; ab < 4; ++ab) {
    for (std::size_t j = 0; j < 8; ++j) {
      T recon = out.weight_local * out.rho0[ab][j] + out.weight_star * out.rho_star[ab][j];
      if (!approx_equal(recon, lik[ab][j])) throw InvariantViolation("input model split does not reconstruct");
    }
  }
  // Uniform mixing of rho* over the 0-bit boxes yields the PR box.
  std::vector<typename InputConditioning<T>::Column> cols(8);
  for (std::size_t j = 0; j < 8; ++j) {
    for (std::size_t ab = 0; ab < 4; ++ab) cols[j][ab] = out.rho_star[ab][j];
  }
  auto star = InputConditioning<T>::from_likelihood(std::move(cols), std::vector<T>(8, from_ratio<T>(1, 8)));
  if (!approx_equal(operational_box(star, zero_bit_correlations<T>()), pr_box<T>())) {
    throw InvariantViolation("uniform mixing of rho* is not the PR box");
  }
  return out;
}

}  // namespace boxlab
