#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "boxlab/correlation.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/rng.hpp"

namespace boxlab {

/// Identifies one trial; every random stream of the trial derives from it.
struct TrialKey {
  std::uint64_t seed = 0;
  std::uint64_t point = 0;
  std::uint64_t trial = 0;

  CounterRng rng(Stream s) const { return {seed, point, trial, s}; }
};

/// What Bob does when the ontic message from Alice has not arrived.
enum class BreakdownPolicy {
  local_marginal,  ///< sample y from the protocol's marginal P(y|b) using shared randomness only
  fair_coin,       ///< output a fair private bit
  default_input,   ///< proceed as if the message carried 0
};

inline std::string to_string(BreakdownPolicy p) {
  switch (p) {
    case BreakdownPolicy::local_marginal: return "local-marginal";
    case BreakdownPolicy::fair_coin: return "fair-coin";
    case BreakdownPolicy::default_input: return "default-input";
  }
  return "local-marginal";
}

inline BreakdownPolicy parse_breakdown_policy(std::string_view s) {
  if (s == "local-marginal" || s == "local_marginal") return BreakdownPolicy::local_marginal;
  if (s == "fair-coin" || s == "fair_coin") return BreakdownPolicy::fair_coin;
  if (s == "default-input" || s == "default_input") return BreakdownPolicy::default_input;
  throw InvalidArgument("unknown breakdown policy: " + std::string(s));
}

/// Alice's half of a trial. (a, x) feed the operational record; message and
/// ontic_key are meta data and never reach it.
struct AliceHalf {
  int a = 0;
  int x = 0;
  int outcome = 0;
  std::optional<int> message;   ///< ontic signal sent toward Bob, if any
  std::uint32_t ontic_key = 0;  ///< identifies the ontic state realized in this trial
  int comm_bits = 0;            ///< classical bits the protocol itself charges for
};

struct BobHalf {
  int b = 0;
  int y = 0;
  int outcome = 0;
  bool fallback = false;  ///< breakdown policy fired
};

/// Integer tallies for one point; equal tallies mean bit-identical statistics.
struct TrialTally {
  std::uint64_t trials = 0;
  std::uint64_t xor_ones = 0;
  std::uint64_t a_ones = 0;
  std::uint64_t b_ones = 0;
  std::uint64_t comm_bits = 0;
  /// Resource interface counts, index a*8 + b*4 + x*2 + y.
  std::array<std::uint64_t, 16> box_counts{};

  void add(const AliceHalf& al, const BobHalf& bo) {
    ++trials;
    xor_ones += static_cast<std::uint64_t>(al.outcome ^ bo.outcome);
    a_ones += static_cast<std::uint64_t>(al.outcome);
    b_ones += static_cast<std::uint64_t>(bo.outcome);
    comm_bits += static_cast<std::uint64_t>(al.comm_bits);
    ++box_counts[box_index(al.a, bo.b, al.x, bo.y)];
  }

  void merge(const TrialTally& o) {
    trials += o.trials;
    xor_ones += o.xor_ones;
    a_ones += o.a_ones;
    b_ones += o.b_ones;
    comm_bits += o.comm_bits;
    for (std::size_t i = 0; i < 16; ++i) box_counts[i] += o.box_counts[i];
  }

  friend bool operator==(const TrialTally&, const TrialTally&) = default;
};

}  // namespace boxlab
