#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "boxlab/errors.hpp"
#include "boxlab/numeric.hpp"

namespace boxlab {

/// Packs (a, b, x, y) into the storage index a*8 + b*4 + x*2 + y.
constexpr std::size_t box_index(int a, int b, int x, int y) {
  return static_cast<std::size_t>(a * 8 + b * 4 + x * 2 + y);
}

/// Output pair (x, y) packed as x*2 + y.
using OutputCode = std::uint8_t;

/// One column of a deterministic-box table: the output code for inputs
/// ab = 00, 01, 10, 11 in that order.
using BoxColumn = std::array<OutputCode, 4>;

struct BoxTables {
  std::array<BoxColumn, 8> zero_bit;
  std::array<BoxColumn, 8> one_bit;

  friend bool operator==(const BoxTables&, const BoxTables&) = default;
};

/// The eight 0-bit boxes (CHSH value +2) and the eight 1-bit boxes
/// (CHSH value +4). Columns are read top to bottom from the published tables.
inline constexpr BoxTables kBoxTables{
    .zero_bit = {{
        {0b00, 0b00, 0b00, 0b00},
        {0b00, 0b00, 0b10, 0b10},
        {0b01, 0b00, 0b01, 0b00},
        {0b11, 0b10, 0b01, 0b00},
        {0b00, 0b01, 0b10, 0b11},
        {0b10, 0b11, 0b10, 0b11},
        {0b11, 0b11, 0b01, 0b01},
        {0b11, 0b11, 0b11, 0b11},
    }},
    .one_bit = {{
        {0b00, 0b00, 0b01, 0b00},
        {0b11, 0b11, 0b01, 0b00},
        {0b00, 0b00, 0b10, 0b11},
        {0b11, 0b11, 0b10, 0b11},
        {0b00, 0b00, 0b10, 0b00},
        {0b11, 0b00, 0b01, 0b00},
        {0b00, 0b11, 0b10, 0b11},
        {0b11, 0b11, 0b01, 0b11},
    }},
};

/// FNV-1a over the output codes, 0-bit columns first, then 1-bit columns.
constexpr std::uint64_t table_checksum(const BoxTables& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::array<BoxColumn, 8>& cols) {
    for (const auto& col : cols) {
      for (OutputCode c : col) {
        h ^= c;
        h *= 0x100000001b3ULL;
      }
    }
  };
  feed(t.zero_bit);
  feed(t.one_bit);
  return h;
}

inline constexpr std::uint64_t kBoxTablesChecksum = 0xaf7d9644ecee76f9ULL;

static_assert(table_checksum(kBoxTables) == kBoxTablesChecksum,
              "embedded box tables drifted from the frozen checksum");

enum class BoxKind : std::uint8_t { ZeroBit, OneBit };

inline std::string to_string(BoxKind k) { return k == BoxKind::ZeroBit ? "0bit" : "1bit"; }

/// One of the sixteen extreme points of the fragment.
class DeterministicBox {
 public:
  constexpr DeterministicBox(BoxKind kind, int j, const BoxTables& tables = kBoxTables)
      : kind_(kind), index_(j), table_{} {
    if (j < 0 || j > 7) throw InvalidArgument("deterministic box index must be in 0..7");
    table_ = kind == BoxKind::ZeroBit ? tables.zero_bit[static_cast<std::size_t>(j)]
                                      : tables.one_bit[static_cast<std::size_t>(j)];
  }

  static constexpr DeterministicBox zero_bit(int j) { return {BoxKind::ZeroBit, j}; }
  static constexpr DeterministicBox one_bit(int j) { return {BoxKind::OneBit, j}; }

  constexpr BoxKind kind() const { return kind_; }
  constexpr int index() const { return index_; }
  constexpr const BoxColumn& table() const { return table_; }

  constexpr OutputCode output(int a, int b) const { return table_[static_cast<std::size_t>(a * 2 + b)]; }
  constexpr int x(int a, int b) const { return output(a, b) >> 1; }
  constexpr int y(int a, int b) const { return output(a, b) & 1; }

  /// Position in the canonical 16-box ordering: 0-bit boxes 0..7, 1-bit boxes 8..15.
  constexpr int flat_index() const { return kind_ == BoxKind::ZeroBit ? index_ : 8 + index_; }

  /// Partner 1-bit box with complemented outputs: pairs (0,3), (1,2), (4,7), (5,6).
  constexpr DeterministicBox antibox() const {
    if (kind_ != BoxKind::OneBit) throw InvalidArgument("only 1-bit boxes have antiboxes");
    constexpr std::array<int, 8> partner{3, 2, 1, 0, 7, 6, 5, 4};
    return {BoxKind::OneBit, partner[static_cast<std::size_t>(index_)]};
  }

  friend constexpr bool operator==(const DeterministicBox& l, const DeterministicBox& r) {
    return l.kind_ == r.kind_ && l.index_ == r.index_ && l.table_ == r.table_;
  }

 private:
  BoxKind kind_;
  int index_;
  BoxColumn table_;
};

inline std::array<DeterministicBox, 16> extreme_boxes(const BoxTables& tables = kBoxTables) {
  return {
      DeterministicBox{BoxKind::ZeroBit, 0, tables}, DeterministicBox{BoxKind::ZeroBit, 1, tables},
      DeterministicBox{BoxKind::ZeroBit, 2, tables}, DeterministicBox{BoxKind::ZeroBit, 3, tables},
      DeterministicBox{BoxKind::ZeroBit, 4, tables}, DeterministicBox{BoxKind::ZeroBit, 5, tables},
      DeterministicBox{BoxKind::ZeroBit, 6, tables}, DeterministicBox{BoxKind::ZeroBit, 7, tables},
      DeterministicBox{BoxKind::OneBit, 0, tables},  DeterministicBox{BoxKind::OneBit, 1, tables},
      DeterministicBox{BoxKind::OneBit, 2, tables},  DeterministicBox{BoxKind::OneBit, 3, tables},
      DeterministicBox{BoxKind::OneBit, 4, tables},  DeterministicBox{BoxKind::OneBit, 5, tables},
      DeterministicBox{BoxKind::OneBit, 6, tables},  DeterministicBox{BoxKind::OneBit, 7, tables},
  };
}

/// Conditional distribution P(x, y | a, b) over binary inputs and outputs.
///
/// Construction validates nonnegativity and the four normalization
/// conditions, exactly for rationals and to 1e-9 for doubles, so every
/// instance is a valid box. Immutable after construction.
template <Scalar T>
class Correlation16 {
 public:
  using value_type = T;

  static Correlation16 from_entries(std::array<T, 16> entries) {
    for (const T& v : entries) {
      if (!approx_geq(v, T(0))) throw InvalidArgument("box entries must be nonnegative");
    }
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        T sum(0);
        for (int o = 0; o < 4; ++o) sum += entries[static_cast<std::size_t>(a * 8 + b * 4 + o)];
        if (!approx_equal(sum, T(1))) {
          throw InvalidArgument("box is not normalized for input ab=" + std::to_string(a) +
                                std::to_string(b));
        }
      }
    }
    return Correlation16(std::move(entries));
  }

  const T& operator()(int a, int b, int x, int y) const { return p_[box_index(a, b, x, y)]; }
  const T& operator[](std::size_t i) const { return p_[i]; }
  std::span<const T, 16> entries() const { return p_; }

  /// P(x | a, b), Alice's marginal.
  T marginal_x(int a, int b, int x) const { return (*this)(a, b, x, 0) + (*this)(a, b, x, 1); }
  /// P(y | a, b), Bob's marginal.
  T marginal_y(int a, int b, int y) const { return (*this)(a, b, 0, y) + (*this)(a, b, 1, y); }

  template <Scalar U>
  Correlation16<U> cast() const {
    std::array<U, 16> out{};
    for (std::size_t i = 0; i < 16; ++i) {
      if constexpr (std::is_same_v<U, T>) {
        out[i] = p_[i];
      } else if constexpr (std::is_same_v<U, double>) {
        out[i] = to_double(p_[i]);
      } else {
        out[i] = from_double<U>(to_double(p_[i]));
      }
    }
    return Correlation16<U>::from_entries(out);
  }

  friend bool operator==(const Correlation16& l, const Correlation16& r) { return l.p_ == r.p_; }

 private:
  explicit Correlation16(std::array<T, 16> p) : p_(std::move(p)) {}

  std::array<T, 16> p_;
};

template <Scalar T>
bool approx_equal(const Correlation16<T>& l, const Correlation16<T>& r) {
  for (std::size_t i = 0; i < 16; ++i) {
    if (!approx_equal(l[i], r[i])) return false;
  }
  return true;
}

/// The deterministic box as a distribution: one unit entry per input pair.
template <Scalar T>
Correlation16<T> as_correlation(const DeterministicBox& box) {
  std::array<T, 16> e{};
  e.fill(T(0));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) e[box_index(a, b, box.x(a, b), box.y(a, b))] = T(1);
  }
  return Correlation16<T>::from_entries(e);
}

/// E(a,b) = P(x = y | ab) - P(x != y | ab).
template <Scalar T>
T correlator(const Correlation16<T>& p, int a, int b) {
  return p(a, b, 0, 0) + p(a, b, 1, 1) - p(a, b, 0, 1) - p(a, b, 1, 0);
}

/// CHSH functional: sum over ab of (-1)^{a(b xor 1)} E(a,b), in [-4, 4].
template <Scalar T>
T chsh_lambda(const Correlation16<T>& p) {
  T total(0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if ((a & (b ^ 1)) != 0) {
        total -= correlator(p, a, b);
      } else {
        total += correlator(p, a, b);
      }
    }
  }
  return total;
}

/// Lambda/2 - 1, the communication cost of an optimal protocol for a box in the fragment.
template <Scalar T>
T cost_from_lambda(const T& lambda) {
  return lambda / 2 - 1;
}

template <Scalar T>
using WeightedBox = std::pair<T, Correlation16<T>>;

template <Scalar T>
void validate_weights(std::span<const T> weights) {
  if (weights.empty()) throw InvalidArgument("mixture needs at least one component");
  T sum(0);
  for (const T& w : weights) {
    if (!approx_geq(w, T(0))) throw InvalidArgument("mixture weights must be nonnegative");
    sum += w;
  }
  if (!approx_equal(sum, T(1))) throw InvalidArgument("mixture weights must sum to 1");
}

/// Entrywise convex combination.
template <Scalar T>
Correlation16<T> mix(std::span<const WeightedBox<T>> components) {
  std::vector<T> weights;
  weights.reserve(components.size());
  for (const auto& c : components) weights.push_back(c.first);
  validate_weights<T>(weights);
  std::array<T, 16> e{};
  e.fill(T(0));
  for (const auto& [w, box] : components) {
    for (std::size_t i = 0; i < 16; ++i) e[i] += w * box[i];
  }
  return Correlation16<T>::from_entries(e);
}

template <Scalar T>
Correlation16<T> mix(const std::vector<WeightedBox<T>>& components) {
  return mix<T>(std::span<const WeightedBox<T>>(components));
}

/// PR box in the fragment's convention: x xor y = a(b xor 1), uniform marginals.
template <Scalar T>
Correlation16<T> pr_box() {
  std::array<T, 16> e{};
  e.fill(T(0));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < 2; ++x) {
        if ((x ^ (a & (b ^ 1))) == 0) {
          e[box_index(a, b, x, 0)] = from_ratio<T>(1, 2);
        } else {
          e[box_index(a, b, x, 1)] = from_ratio<T>(1, 2);
        }
      }
    }
  }
  return Correlation16<T>::from_entries(e);
}

template <Scalar T>
Correlation16<T> white_noise() {
  std::array<T, 16> e{};
  e.fill(from_ratio<T>(1, 4));
  return Correlation16<T>::from_entries(e);
}

/// Uniform mixture of the eight 0-bit boxes.
template <Scalar T>
Correlation16<T> uniform_local() {
  std::vector<WeightedBox<T>> parts;
  for (int j = 0; j < 8; ++j) parts.emplace_back(from_ratio<T>(1, 8), as_correlation<T>(DeterministicBox::zero_bit(j)));
  return mix(parts);
}

}  // namespace boxlab
