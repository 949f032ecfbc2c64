#pragma once

// Shared helpers for the unit and acceptance tests: a tiny deterministic
// generator for property tests and a few oracles.

#include <cstdint>
#include <string>
#include <vector>

#include "bloomsketch/filter.hpp"
#include "bloomsketch/hash.hpp"

namespace testing {

// SplitMix64; good enough to drive randomized cases and fully reproducible.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [lo, hi].
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) { return lo + next() % (hi - lo + 1); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool coin(double p = 0.5) { return unit() < p; }

  std::string item(std::size_t max_len = 24) {
    std::string s(range(0, max_len), '\0');
    for (auto& c : s) c = static_cast<char>(next() & 0xff);
    return s;
  }
  std::vector<std::string> distinct_items(std::size_t n, const std::string& prefix = "it") {
    std::vector<std::string> out;
    out.reserve(n);
    const auto tag = next();
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(tag) + ":" + std::to_string(i));
    return out;
  }

 private:
  std::uint64_t state_;
};

inline std::vector<std::string> keys(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline double rel_err(double measured, double expected) {
  return expected == 0.0 ? measured : (measured - expected) / expected;
}

// Fraction of probes a filter reports present.
template <class F>
double positive_rate(const F& f, const std::vector<std::string>& probes) {
  std::size_t hits = 0;
  for (const auto& p : probes) hits += f.query(p).present();
  return static_cast<double>(hits) / static_cast<double>(probes.size());
}

inline bool same_outcome(const bloomsketch::QueryOutcome& a, const bloomsketch::QueryOutcome& b) {
  return a.verdict == b.verdict && a.maybe_false_positive == b.maybe_false_positive && a.frequency == b.frequency &&
         a.auxiliary == b.auxiliary && a.needs_oracle == b.needs_oracle;
}

}  // namespace testing
