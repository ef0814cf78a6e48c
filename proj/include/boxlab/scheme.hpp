#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "boxlab/correlation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/numeric.hpp"

namespace boxlab {

/// Input-biasing scheme over the eight 0-bit boxes. For ontic state d^{j_0}
/// the input pair ab is drawn with weight alpha where the box's output at ab
/// contributes negatively to the CHSH sum, and beta = (1 - alpha)/3 elsewhere.
/// kSuppressed[ab][j] marks the alpha cells; each column has exactly one.
inline constexpr std::array<std::array<bool, 8>, 4> kSuppressed{{
    {false, false, true, false, false, true, false, false},
    {false, false, false, true, true, false, false, false},
    {true, false, false, false, false, false, false, true},
    {false, true, false, false, false, false, true, false},
}};

template <Scalar T>
void check_alpha(const T& alpha) {
  if (alpha < T(0) || alpha > from_ratio<T>(1, 4)) throw InvalidArgument("alpha must lie in [0, 1/4]");
}

template <Scalar T>
T beta_from_alpha(const T& alpha) {
  return (T(1) - alpha) / 3;
}

/// rho(ab | d^{j_0}) at [ab][j].
template <Scalar T>
std::array<std::array<T, 8>, 4> biased_likelihood(const T& alpha) {
  check_alpha(alpha);
  T beta = beta_from_alpha(alpha);
  std::array<std::array<T, 8>, 4> out{};
  for (std::size_t ab = 0; ab < 4; ++ab) {
    for (std::size_t j = 0; j < 8; ++j) out[ab][j] = kSuppressed[ab][j] ? alpha : beta;
  }
  return out;
}

/// The biased scheme as an InputConditioning over the eight 0-bit boxes with a uniform prior.
template <Scalar T>
InputConditioning<T> biased_conditioning(const T& alpha) {
  auto lik = biased_likelihood(alpha);
  std::vector<typename InputConditioning<T>::Column> cols(8);
  for (std::size_t j = 0; j < 8; ++j) {
    for (std::size_t ab = 0; ab < 4; ++ab) cols[j][ab] = lik[ab][j];
  }
  return InputConditioning<T>::from_likelihood(std::move(cols), std::vector<T>(8, from_ratio<T>(1, 8)));
}

template <Scalar T>
std::vector<Correlation16<T>> zero_bit_correlations() {
  std::vector<Correlation16<T>> out;
  for (int j = 0; j < 8; ++j) out.push_back(as_correlation<T>(DeterministicBox::zero_bit(j)));
  return out;
}

template <Scalar T>
std::vector<Correlation16<T>> one_bit_correlations() {
  std::vector<Correlation16<T>> out;
  for (int j = 0; j < 8; ++j) out.push_back(as_correlation<T>(DeterministicBox::one_bit(j)));
  return out;
}

/// P(xy|ab) = sum_lambda rho(lambda|ab) d_lambda(xy|ab).
template <Scalar T>
Correlation16<T> operational_box(const InputConditioning<T>& cond, const std::vector<Correlation16<T>>& boxes) {
  if (boxes.size() != cond.states()) throw InvalidArgument("one box per ontic state required");
  std::array<T, 16> e{};
  e.fill(T(0));
  for (std::size_t l = 0; l < cond.states(); ++l) {
    for (std::size_t i = 0; i < 16; ++i) e[i] += cond.lambda_given_ab(l, i / 4) * boxes[l][i];
  }
  return Correlation16<T>::from_entries(e);
}

}  // namespace boxlab
