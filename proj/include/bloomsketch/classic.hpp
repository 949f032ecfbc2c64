#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "bloomsketch/bit_vector.hpp"
#include "bloomsketch/counter_vector.hpp"
#include "bloomsketch/filter.hpp"
#include "bloomsketch/hash.hpp"

namespace bloomsketch {

// The classic bit-array filter: m bits, k hash functions.
class StandardBF final : public MembershipFilter {
 public:
  StandardBF(std::size_t m, std::size_t k, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::standard; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  [[nodiscard]] std::size_t m() const noexcept { return bits_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
  [[nodiscard]] std::vector<std::uint64_t> positions(std::string_view item) const;

  // Clears one bit; used by bit-clearing variants.
  void reset_bit(std::size_t i) { bits_.reset(i); }

  static StandardBF restore(BitVector bits, std::size_t k, HashFamily hashes, std::uint64_t n);

 private:
  std::size_t k_;
  HashFamily hashes_;
  BitVector bits_;
};

// Counting filter with 4-bit counters. A counter that reaches 15 is sticky:
// it is never decremented again, which keeps removals from creating false
// negatives. Saturation is reported through saturation_events().
class CountingBF final : public MembershipFilter {
 public:
  static constexpr unsigned kCounterWidth = 4;

  CountingBF(std::size_t m, std::size_t k, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::counting; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return counters_.size() * kCounterWidth; }

  [[nodiscard]] std::size_t m() const noexcept { return counters_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const CounterVector& counters() const noexcept { return counters_; }
  [[nodiscard]] std::vector<std::uint64_t> positions(std::string_view item) const;

  // Increments that found their counter already saturated.
  [[nodiscard]] std::uint64_t saturation_events() const noexcept { return saturation_events_; }

  // Cell-wise saturating sum with a filter of identical geometry and hashes.
  void absorb(const CountingBF& other);

  static CountingBF restore(CounterVector counters, std::size_t k, HashFamily hashes, std::uint64_t n,
                            std::uint64_t saturation_events);

 private:
  std::size_t k_;
  HashFamily hashes_;
  CounterVector counters_;
  std::uint64_t saturation_events_ = 0;
};

enum class SpectralMode : std::uint8_t { plain, minimum_increase };

// Counter filter whose frequency estimate is the minimum of the item's
// counters. In minimum-increase mode an insert only bumps the counters that
// currently hold that minimum.
class SpectralBF final : public MembershipFilter {
 public:
  SpectralBF(std::size_t m, std::size_t k, SpectralMode mode = SpectralMode::minimum_increase,
             unsigned counter_width = 8, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::spectral; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  // Plain mode decrements every counter. Minimum-increase mode decrements
  // only the counters holding the minimum, mirroring insert; under
  // collisions that can undercount other items.
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return counters_.size() * counters_.width(); }

  [[nodiscard]] SpectralMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const CounterVector& counters() const noexcept { return counters_; }
  [[nodiscard]] std::uint64_t saturation_events() const noexcept { return saturation_events_; }

  static SpectralBF restore(CounterVector counters, std::size_t k, SpectralMode mode, HashFamily hashes,
                            std::uint64_t n, std::uint64_t saturation_events);

 private:
  [[nodiscard]] std::vector<std::uint64_t> distinct_positions(std::string_view item) const;

  std::size_t k_;
  SpectralMode mode_;
  HashFamily hashes_;
  CounterVector counters_;
  std::uint64_t saturation_events_ = 0;
};

// Bit-array filter that encodes multiplicity by probing extra hash functions.
// Insert sets the k base bits, then walks functions k, k+1, ... and sets the
// first zero bit it meets (at most max_probe extra functions). The count of an
// item is the run of set bits along that walk.
class AdaptiveBF final : public MembershipFilter {
 public:
  AdaptiveBF(std::size_t m, std::size_t k, std::size_t max_probe = 16, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::adaptive; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t max_probe() const noexcept { return max_probe_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }

  static AdaptiveBF restore(BitVector bits, std::size_t k, std::size_t max_probe, HashFamily hashes,
                            std::uint64_t n);

 private:
  [[nodiscard]] bool base_bits_set(std::string_view item) const;
  [[nodiscard]] std::uint64_t run_length(std::string_view item) const;

  std::size_t k_;
  std::size_t max_probe_;
  HashFamily hashes_;
  BitVector bits_;
};

}  // namespace bloomsketch
