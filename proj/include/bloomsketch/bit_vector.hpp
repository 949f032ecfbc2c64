#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bloomsketch {

// Fixed-length bit array packed into 64-bit words, bit i stored at word i/64,
// position i%64 (little-endian bit order). Unused high bits of the last word
// are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size_bits);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

  [[nodiscard]] bool test(std::size_t i) const noexcept {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void assign(std::size_t i, bool value) noexcept { value ? set(i) : reset(i); }
  void clear() noexcept;

  [[nodiscard]] std::size_t popcount() const noexcept;
  // Number of set bits in [0, pos).
  [[nodiscard]] std::size_t rank(std::size_t pos) const noexcept;

  // Grows the vector by one bit, shifting bits at and above pos up by one.
  void insert_bit(std::size_t pos, bool value);
  // Removes bit pos, shifting the bits above it down by one.
  void erase_bit(std::size_t pos);

  BitVector& operator&=(const BitVector& other);
  BitVector& operator|=(const BitVector& other);

  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::span<std::uint64_t> words() noexcept { return words_; }

  // Rebuilds from packed words; bits beyond size_bits must be zero.
  static BitVector from_words(std::size_t size_bits, std::vector<std::uint64_t> words);

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void trim_tail() noexcept;

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

[[nodiscard]] std::size_t and_popcount(const BitVector& a, const BitVector& b);

}  // namespace bloomsketch
