#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bloomsketch {

// Keyed 64-bit hash over a byte sequence. Reads input little-endian, so the
// result is identical on every platform.
[[nodiscard]] std::uint64_t hash64(std::string_view bytes, std::uint64_t seed) noexcept;

// 64-bit finalizer (bijective avalanche mix).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Little-endian 8-byte encoding, the canonical item form for integer keys.
[[nodiscard]] std::string encode_u64(std::uint64_t value);

using IndexScript = std::map<std::string, std::vector<std::uint64_t>, std::less<>>;

// Seeded generator of k indices per item. Indices are derived by double
// hashing: h_i = (a + i*b) mod m where a and b come from one keyed base hash
// and b is odd and nonzero mod m.
//
// A scripted family returns caller-provided index lists for the items in its
// script (used to replay worked examples exactly) and falls back to seeded
// hashing for everything else.
class HashFamily {
 public:
  explicit HashFamily(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  static HashFamily scripted(IndexScript script, std::uint64_t fallback_seed = 0);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] bool is_scripted() const noexcept { return script_ != nullptr; }

  // Keyed base hash of the item.
  [[nodiscard]] std::uint64_t base(std::string_view item) const noexcept { return hash64(item, seed_); }

  // Exactly k indices in [0, m). Throws ParameterError if k == 0 or m < 2.
  [[nodiscard]] std::vector<std::uint64_t> indices(std::string_view item, std::size_t k, std::uint64_t m) const;
  // Allocation-free form: fills out[0..out.size()) for k = out.size().
  void indices_into(std::string_view item, std::uint64_t m, std::span<std::uint64_t> out) const;
  // The i-th derived function alone (i counts from 0).
  [[nodiscard]] std::uint64_t index_at(std::string_view item, std::size_t i, std::uint64_t m) const;

  // A family with an unrelated seed; scripts are not inherited.
  [[nodiscard]] HashFamily derive(std::uint64_t salt) const noexcept;

 private:
  const std::vector<std::uint64_t>* lookup(std::string_view item) const;

  std::uint64_t seed_;
  std::shared_ptr<const IndexScript> script_;
};

// Convenience wrapper around HashFamily(seed).indices(item, k, m).
[[nodiscard]] std::vector<std::uint64_t> hash_indices(std::string_view item, std::size_t k, std::uint64_t m,
                                                      std::uint64_t seed);

// f-bit fingerprint, 1 <= f <= 32. Value 0 is reserved as the empty-slot
// sentinel and is remapped to 1.
struct Fingerprint {
  std::uint32_t value = 0;
  unsigned width = 1;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};
[[nodiscard]] Fingerprint fingerprint(std::string_view item, unsigned f, std::uint64_t seed);

// Offset in [1, w_bar - 1]; requires w_bar >= 2.
[[nodiscard]] std::uint64_t offset_of(std::string_view item, std::uint64_t w_bar, std::uint64_t seed);

// Discretizes each component of a real vector into one of q symbols by
// bucketing [low, high] into q equal cells (values outside are clamped), then
// hashes the symbol string.
class VectorHasher {
 public:
  VectorHasher(unsigned q, double low = 0.0, double high = 1.0);

  [[nodiscard]] unsigned levels() const noexcept { return q_; }
  [[nodiscard]] std::vector<std::uint32_t> quantize(std::span<const double> v) const;
  [[nodiscard]] std::uint64_t operator()(std::span<const double> v, std::uint64_t seed) const;

 private:
  unsigned q_;
  double low_;
  double high_;
};

[[nodiscard]] std::uint64_t vector_hash(std::span<const double> v, unsigned q, std::uint64_t seed);

}  // namespace bloomsketch
