#include "bloomsketch/counter_vector.hpp"

#include <bit>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

CounterVector::CounterVector(std::size_t size, unsigned width)
    : size_(size), width_(width) {
  if (width == 0 || width > 32 || !std::has_single_bit(width)) {
    throw ParameterError("CounterVector: width must be 1, 2, 4, 8, 16 or 32 bits");
  }
  per_word_ = 64 / width;
  mask_ = (std::uint64_t{1} << width) - 1;
  words_.assign((size + per_word_ - 1) / per_word_, 0);
}

void CounterVector::put(std::size_t i, std::uint32_t value) noexcept {
  auto& word = words_[i / per_word_];
  const unsigned s = shift(i);
  word = (word & ~(mask_ << s)) | ((static_cast<std::uint64_t>(value) & mask_) << s);
}

bool CounterVector::increment(std::size_t i) noexcept {
  const auto v = get(i);
  if (v == max()) return false;
  put(i, v + 1);
  return true;
}

bool CounterVector::decrement(std::size_t i) noexcept {
  const auto v = get(i);
  if (v == 0 || v == max()) return false;
  put(i, v - 1);
  return true;
}

std::size_t CounterVector::nonzero() const noexcept {
  std::size_t total = 0;
  for (std::size_t i = 0; i < size_; ++i) total += get(i) != 0;
  return total;
}

std::uint64_t CounterVector::sum() const noexcept {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < size_; ++i) total += get(i);
  return total;
}

CounterVector CounterVector::from_words(std::size_t size, unsigned width, std::vector<std::uint64_t> words) {
  CounterVector out(size, width);
  if (words.size() != out.words_.size()) {
    throw ParameterError("CounterVector::from_words: word count does not match size");
  }
  out.words_ = std::move(words);
  return out;
}

}  // namespace bloomsketch
