#include "bloomsketch/bit_vector.hpp"

#include <algorithm>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {
constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }
}  // namespace

BitVector::BitVector(std::size_t size_bits) : size_(size_bits), words_(words_for(size_bits), 0) {}

void BitVector::clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

std::size_t BitVector::popcount() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::size_t BitVector::rank(std::size_t pos) const noexcept {
  std::size_t total = 0;
  const std::size_t full = pos >> 6;
  for (std::size_t w = 0; w < full; ++w) total += static_cast<std::size_t>(std::popcount(words_[w]));
  if (const std::size_t rem = pos & 63; rem != 0) {
    total += static_cast<std::size_t>(std::popcount(words_[full] & ((std::uint64_t{1} << rem) - 1)));
  }
  return total;
}

void BitVector::insert_bit(std::size_t pos, bool value) {
  if (pos > size_) throw ParameterError("BitVector::insert_bit: position past end");
  ++size_;
  if (words_.size() < words_for(size_)) words_.push_back(0);
  const std::size_t word = pos >> 6;
  const unsigned offset = pos & 63;
  // Carry the top bit of each word into the next, from the end backwards.
  for (std::size_t w = words_.size() - 1; w > word; --w) {
    words_[w] = (words_[w] << 1) | (words_[w - 1] >> 63);
  }
  const std::uint64_t low_mask = offset == 0 ? 0 : ((std::uint64_t{1} << offset) - 1);
  const std::uint64_t low = words_[word] & low_mask;
  const std::uint64_t high = (words_[word] & ~low_mask) << 1;
  words_[word] = low | high | (static_cast<std::uint64_t>(value) << offset);
  trim_tail();
}

void BitVector::erase_bit(std::size_t pos) {
  if (pos >= size_) throw ParameterError("BitVector::erase_bit: position past end");
  const std::size_t word = pos >> 6;
  const unsigned offset = pos & 63;
  const std::uint64_t low_mask = offset == 0 ? 0 : ((std::uint64_t{1} << offset) - 1);
  const std::uint64_t low = words_[word] & low_mask;
  std::uint64_t high = (words_[word] >> 1) & ~low_mask;
  if (word + 1 < words_.size()) high |= words_[word + 1] << 63;
  words_[word] = low | high;
  for (std::size_t w = word + 1; w < words_.size(); ++w) {
    words_[w] >>= 1;
    if (w + 1 < words_.size()) words_[w] |= words_[w + 1] << 63;
  }
  --size_;
  words_.resize(words_for(size_));
  trim_tail();
}

BitVector& BitVector::operator&=(const BitVector& other) {
  if (other.size_ != size_) throw ParameterError("BitVector: size mismatch in AND");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
  if (other.size_ != size_) throw ParameterError("BitVector: size mismatch in OR");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

BitVector BitVector::from_words(std::size_t size_bits, std::vector<std::uint64_t> words) {
  if (words.size() != words_for(size_bits)) {
    throw ParameterError("BitVector::from_words: word count does not match size");
  }
  BitVector out;
  out.size_ = size_bits;
  out.words_ = std::move(words);
  const auto before = out.words_.empty() ? 0 : out.words_.back();
  out.trim_tail();
  if (!out.words_.empty() && out.words_.back() != before) {
    throw ParameterError("BitVector::from_words: bits set beyond size");
  }
  return out;
}

void BitVector::trim_tail() noexcept {
  if (const unsigned rem = size_ & 63; rem != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << rem) - 1;
  }
}

std::size_t and_popcount(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw ParameterError("and_popcount: size mismatch");
  std::size_t total = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t w = 0; w < wa.size(); ++w) total += static_cast<std::size_t>(std::popcount(wa[w] & wb[w]));
  return total;
}

}  // namespace bloomsketch
