#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bloomsketch {

// Array of saturating unsigned counters, `width` bits each, packed into 64-bit
// words. Width must be a power of two no larger than 32 so no counter straddles
// a word boundary. A counter that reaches max() stays there: increments and
// decrements of a saturated counter are no-ops.
class CounterVector {
 public:
  CounterVector() = default;
  CounterVector(std::size_t size, unsigned width);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] unsigned width() const noexcept { return width_; }
  [[nodiscard]] std::uint32_t max() const noexcept { return static_cast<std::uint32_t>(mask_); }

  [[nodiscard]] std::uint32_t get(std::size_t i) const noexcept {
    return static_cast<std::uint32_t>((words_[i / per_word_] >> shift(i)) & mask_);
  }
  void put(std::size_t i, std::uint32_t value) noexcept;

  [[nodiscard]] bool saturated(std::size_t i) const noexcept { return get(i) == max(); }

  // Returns false when the counter was already saturated (the call is a no-op).
  bool increment(std::size_t i) noexcept;
  // Returns false when the counter is zero or saturated (the call is a no-op).
  bool decrement(std::size_t i) noexcept;

  [[nodiscard]] std::size_t nonzero() const noexcept;
  [[nodiscard]] std::uint64_t sum() const noexcept;

  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  static CounterVector from_words(std::size_t size, unsigned width, std::vector<std::uint64_t> words);

  friend bool operator==(const CounterVector&, const CounterVector&) = default;

 private:
  [[nodiscard]] unsigned shift(std::size_t i) const noexcept {
    return static_cast<unsigned>((i % per_word_) * width_);
  }

  std::size_t size_ = 0;
  unsigned width_ = 1;
  std::size_t per_word_ = 64;
  std::uint64_t mask_ = 1;
  std::vector<std::uint64_t> words_;
};

}  // namespace bloomsketch
