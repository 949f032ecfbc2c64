#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "bloomsketch/bit_vector.hpp"
#include "bloomsketch/filter.hpp"

namespace bloomsketch {

// k distinct primes whose sum is the largest achievable value <= total_bits,
// drawn from the 3k + 8 primes <= total_bits nearest total_bits / k. Ties
// between equal sums go to the set built greedily from the closest primes.
// Throws ParameterError when total_bits < 2k or no such set exists.
[[nodiscard]] std::vector<std::uint64_t> ohbf_partition_sizes(std::uint64_t total_bits, std::size_t k);

[[nodiscard]] bool is_prime(std::uint64_t n) noexcept;

// One-hashing filter: a single 64-bit hash H, reduced modulo k pairwise
// coprime partition sizes; partition i owns bits [offset_i, offset_i + m_i).
class OHBF final : public MembershipFilter {
 public:
  OHBF(std::uint64_t total_bits, std::size_t k, std::uint64_t seed = 0);
  // Explicit partition sizes; they must be pairwise coprime and at least 2.
  OHBF(std::vector<std::uint64_t> moduli, std::uint64_t seed);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::one_hashing; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  [[nodiscard]] std::vector<std::uint64_t> positions(std::string_view item) const;
  [[nodiscard]] const std::vector<std::uint64_t>& moduli() const noexcept { return moduli_; }
  [[nodiscard]] std::size_t k() const noexcept { return moduli_.size(); }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }

  static OHBF restore(std::vector<std::uint64_t> moduli, std::uint64_t seed, BitVector bits, std::uint64_t n);

 private:
  std::vector<std::uint64_t> moduli_;
  std::vector<std::uint64_t> offsets_;
  std::uint64_t seed_;
  BitVector bits_;
};

struct UFBFLocation {
  std::uint64_t block = 0;
  std::vector<std::uint64_t> offsets;  // one bit offset in [0, w) per word
  friend bool operator==(const UFBFLocation&, const UFBFLocation&) = default;
};

// Ultra-fast filter: l blocks of k words of w bits. h_0 picks the block and
// h_i sets one bit in word i of that block.
class UFBF final : public MembershipFilter {
 public:
  UFBF(std::size_t l, std::size_t k = 8, std::size_t w = 64, std::uint64_t seed = 0);
  // Enough cache-line blocks (k*w = 512 bits) for `capacity` items at the
  // given bits-per-element budget.
  static UFBF for_capacity(std::size_t capacity, double bits_per_element, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::ultra_fast; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  [[nodiscard]] UFBFLocation locate(std::string_view item) const;
  // Absolute bit indices for a location.
  [[nodiscard]] std::vector<std::uint64_t> positions(const UFBFLocation& loc) const;

  [[nodiscard]] std::size_t l() const noexcept { return l_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t w() const noexcept { return w_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }

  static UFBF restore(std::size_t l, std::size_t k, std::size_t w, std::uint64_t seed, BitVector bits,
                      std::uint64_t n);

 private:
  std::size_t l_;
  std::size_t k_;
  std::size_t w_;
  std::uint64_t seed_;
  BitVector bits_;
};

// Golden-vector convenience wrapper: UFBF(l, k, w, seed).locate(item).
[[nodiscard]] UFBFLocation ufbf_locate(std::string_view item, std::size_t l, std::size_t k, std::size_t w,
                                       std::uint64_t seed);

}  // namespace bloomsketch
