#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

#include "boxlab/correlation.hpp"
#include "boxlab/decomposition.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/numeric.hpp"

namespace boxlab::io {

using json = nlohmann::json;

/// Rationals serialize as "p/q" strings (integers as "p"); doubles as numbers.
inline json scalar_to_json(const Rational& v) { return to_string(v); }
inline json scalar_to_json(double v) { return v; }

template <Scalar T>
T scalar_from_json(const json& j) {
  if (j.is_string()) return parse_scalar<T>(j.get<std::string>());
  if (j.is_number_integer()) return from_ratio<T>(j.get<std::int64_t>());
  if (j.is_number()) {
    if constexpr (ScalarTraits<T>::exact) {
      return from_double<Rational>(j.get<double>());
    } else {
      return j.get<double>();
    }
  }
  throw InvalidArgument("expected a number or a \"p/q\" string, got " + j.dump());
}

/// 16-element array in the order a*8 + b*4 + x*2 + y.
template <Scalar T>
json correlation_to_json(const Correlation16<T>& p) {
  json arr = json::array();
  for (std::size_t i = 0; i < 16; ++i) arr.push_back(scalar_to_json(p[i]));
  return arr;
}

inline json box_to_json(const DeterministicBox& b) { return {{"kind", to_string(b.kind())}, {"j", b.index()}}; }

inline DeterministicBox box_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("j")) {
    throw InvalidArgument("box must be {\"kind\": \"0bit\"|\"1bit\", \"j\": int}");
  }
  auto kind = j.at("kind").get<std::string>();
  int idx = j.at("j").get<int>();
  if (kind == "0bit") return DeterministicBox::zero_bit(idx);
  if (kind == "1bit") return DeterministicBox::one_bit(idx);
  throw InvalidArgument("box kind must be \"0bit\" or \"1bit\"");
}

/// Named boxes: "pr", "white", "uniform-local", "0bit:j", "1bit:j".
template <Scalar T>
Correlation16<T> named_correlation(std::string_view name) {
  if (name == "pr") return pr_box<T>();
  if (name == "white") return white_noise<T>();
  if (name == "uniform-local") return uniform_local<T>();
  if (name.size() == 6 && (name.starts_with("0bit:") || name.starts_with("1bit:"))) {
    int j = name[5] - '0';
    return as_correlation<T>(name[0] == '0' ? DeterministicBox::zero_bit(j) : DeterministicBox::one_bit(j));
  }
  throw InvalidArgument("unknown box name: " + std::string(name));
}

/// Accepts a 16-element array, a box object, a box name, or {"correlation": ...}.
template <Scalar T>
Correlation16<T> correlation_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 16) throw InvalidArgument("correlation array must have 16 entries");
    std::array<T, 16> e{};
    for (std::size_t i = 0; i < 16; ++i) e[i] = scalar_from_json<T>(j[i]);
    return Correlation16<T>::from_entries(e);
  }
  if (j.is_string()) return named_correlation<T>(j.get<std::string>());
  if (j.is_object() && j.contains("correlation")) return correlation_from_json<T>(j.at("correlation"));
  if (j.is_object() && j.contains("kind")) return as_correlation<T>(box_from_json(j));
  throw InvalidArgument("unrecognized correlation JSON");
}

template <Scalar T>
json signal_report_to_json(const SignalReport<T>& r) {
  json d = json::array();
  for (const auto& v : r.deltas) d.push_back(scalar_to_json(v));
  return {{"S", scalar_to_json(r.s)},
          {"S_a_to_b", scalar_to_json(r.s_a_to_b)},
          {"S_b_to_a", scalar_to_json(r.s_b_to_a)},
          {"deltas", d}};
}

template <Scalar T>
json decomposition_to_json(const Decomposition<T>& d) {
  json p0 = json::array();
  json p1 = json::array();
  for (std::size_t j = 0; j < 8; ++j) {
    p0.push_back(scalar_to_json(d.p0[j]));
    p1.push_back(scalar_to_json(d.p1[j]));
  }
  return {{"p0", p0}, {"p1", p1}, {"p1_total", scalar_to_json(d.p1_total())}};
}

template <Scalar T>
json certificate_to_json(const CostCertificate<T>& c) {
  json d = json::array();
  for (const auto& v : c.deltas) d.push_back(scalar_to_json(v));
  return {{"c_lambda", scalar_to_json(c.c_lambda)},
          {"p1_total", scalar_to_json(c.p1_total)},
          {"lp_min_p1", scalar_to_json(c.lp_min_p1)},
          {"deltas", d},
          {"optimal", c.optimal}};
}

/// FNV-1a 64 of the canonical (sorted-key, compact) serialization, as 16 hex digits.
inline std::string content_hash(const json& j) {
  std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace boxlab::io
