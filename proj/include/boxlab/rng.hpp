#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace boxlab {

/// Independent random streams used by one trial. Each (seed, point, trial,
/// stream) tuple owns its own generator, so trials can run in any order.
enum class Stream : std::uint64_t {
  chi = 1,              ///< shared strategy choice
  chi_plus = 2,         ///< shared direction vectors
  chi_star_mode = 3,    ///< mode selector of the reduced-free-will resource
  chi_star_input = 4,   ///< input-bias sampler of the reduced-free-will resource
  box = 5,              ///< resource-internal randomness
  input_a = 6,          ///< Alice's free input choice
  input_b = 7,          ///< Bob's free input choice
  bob_local = 8,        ///< Bob's private randomness for breakdown fallbacks
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// SplitMix64 generator keyed by (seed, point, trial, stream).
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t point, std::uint64_t trial, Stream stream)
      : state_(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ point) ^ trial) ^
                          static_cast<std::uint64_t>(stream))) {}

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr int bit() { return static_cast<int>(next() >> 63); }

  constexpr bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  constexpr std::uint64_t below(std::uint64_t n) {
    // Rejection keeps the distribution exactly uniform.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      std::uint64_t v = next();
      if (v < limit) return v % n;
    }
  }

 private:
  std::uint64_t state_;
};

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;

  friend constexpr Vec3 operator+(const Vec3& l, const Vec3& r) { return {l.x + r.x, l.y + r.y, l.z + r.z}; }
  friend constexpr Vec3 operator-(const Vec3& l, const Vec3& r) { return {l.x - r.x, l.y - r.y, l.z - r.z}; }
  friend constexpr Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& l, const Vec3& r) { return l.x * r.x + l.y * r.y + l.z * r.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Uniform direction on the unit sphere: z = cos(polar angle) uniform on [-1, 1].
inline Vec3 random_unit_vector(CounterRng& rng) {
  double z = 2.0 * rng.uniform() - 1.0;
  double phi = 2.0 * std::numbers::pi * rng.uniform();
  double r = std::sqrt(1.0 - z * z);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace boxlab
