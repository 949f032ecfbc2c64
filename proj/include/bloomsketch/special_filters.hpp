#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "bloomsketch/bit_vector.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/counter_vector.hpp"
#include "bloomsketch/filter.hpp"
#include "bloomsketch/hash.hpp"

namespace bloomsketch {

// ---------------------------------------------------------------------------
// Deletable filter: m data bits split into r equal regions plus one
// collision bit per region. A bit may be reset on removal only when its
// region has never seen an insert land on an already-set bit.

class DeletableBF final : public MembershipFilter {
 public:
  // m must be a multiple of regions.
  DeletableBF(std::size_t m, std::size_t k, std::size_t regions, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::deletable; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  // removed if at least one bit was reset, not_deletable if every bit lies in
  // a collision region, not_found if the item does not query present.
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size() + collisions_.size(); }

  [[nodiscard]] std::size_t region_of(std::size_t bit) const noexcept { return bit / region_size_; }
  [[nodiscard]] bool deletable(std::string_view item) const;
  [[nodiscard]] std::vector<std::uint64_t> positions(std::string_view item) const;

  [[nodiscard]] std::size_t m() const noexcept { return bits_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t regions() const noexcept { return collisions_.size(); }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
  [[nodiscard]] const BitVector& collision_map() const noexcept { return collisions_; }

  static DeletableBF restore(std::size_t k, HashFamily hashes, BitVector bits, BitVector collisions, std::uint64_t n);

 private:
  std::size_t k_;
  std::size_t region_size_;
  HashFamily hashes_;
  BitVector bits_;
  BitVector collisions_;
};

// ---------------------------------------------------------------------------
// Distance-sensitive filter over fixed-length bit vectors (Hamming metric),
// built from bit-sampling LSH. Items in the generic interface are strings of
// '0'/'1' characters of length dim.

struct DSBFParams {
  std::size_t dim = 64;
  double eps = 1.0;       // "close" radius, in coordinates
  double delta = 25.6;    // "far" radius, eps < delta <= dim
  std::size_t capacity = 1000;
  double beta = 0.05;     // target miss rate for close probes
  double gamma = 0.05;    // target hit rate for far probes
  double bucket_bits_per_entry = 10.0;
  std::size_t bucket_k = 7;
};

struct DSBFGeometry {
  std::size_t g = 0;  // sampled coordinates per function
  std::size_t k = 0;  // LSH functions
  std::size_t t = 0;  // votes needed for "near"
  double p_close = 0.0;
  double p_far = 0.0;
};

// Derives (g, k, t) from the thresholds; throws when the sampled functions
// cannot separate close from far probes.
[[nodiscard]] DSBFGeometry dsbf_geometry(const DSBFParams& p);

class DistanceSensitiveBF final : public MembershipFilter {
 public:
  explicit DistanceSensitiveBF(DSBFParams params, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::distance_sensitive; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return buckets_.memory_bits(); }

  void insert_point(const BitVector& v);
  [[nodiscard]] bool near(const BitVector& v) const;
  [[nodiscard]] std::size_t votes(const BitVector& v) const;

  [[nodiscard]] BitVector parse_point(std::string_view item) const;
  [[nodiscard]] const DSBFParams& params() const noexcept { return params_; }
  [[nodiscard]] const DSBFGeometry& geometry() const noexcept { return geo_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const StandardBF& buckets() const noexcept { return buckets_; }
  [[nodiscard]] const std::vector<std::vector<std::uint32_t>>& samples() const noexcept { return samples_; }

  static DistanceSensitiveBF restore(DSBFParams params, std::uint64_t seed, BitVector bucket_bits, std::uint64_t n);

 private:
  [[nodiscard]] std::string bucket_key(const BitVector& v, std::size_t fn) const;
  void check_dim(const BitVector& v) const;

  DSBFParams params_;
  DSBFGeometry geo_;
  std::uint64_t seed_;
  std::vector<std::vector<std::uint32_t>> samples_;
  StandardBF buckets_;
};

// ---------------------------------------------------------------------------
// Cuckoo filter with partial-key hashing. Fingerprint 0 marks an empty slot.

class CuckooFilter final : public MembershipFilter {
 public:
  // buckets must be a power of two.
  CuckooFilter(std::size_t buckets, std::size_t slots_per_bucket = 4, unsigned fp_bits = 12,
               std::size_t max_kicks = 500, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::cuckoo; }
  // failed when relocation runs out of kicks; the table is then unchanged.
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  // Removes one copy of the item's fingerprint.
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return slots_.size() * fp_bits_; }

  [[nodiscard]] std::uint32_t fingerprint_of(std::string_view item) const;
  [[nodiscard]] std::size_t primary_bucket(std::string_view item) const;
  // i xor (hash(fp) mod B); an involution in i.
  [[nodiscard]] std::size_t alternate_bucket(std::size_t i, std::uint32_t fp) const;

  // Every stored fingerprint is nonzero, fits in f bits, and its alternate
  // bucket maps back to the bucket holding it.
  [[nodiscard]] bool audit() const;

  [[nodiscard]] std::size_t bucket_count() const noexcept { return buckets_; }
  [[nodiscard]] std::size_t slots_per_bucket() const noexcept { return b_; }
  [[nodiscard]] unsigned fp_bits() const noexcept { return fp_bits_; }
  [[nodiscard]] std::size_t max_kicks() const noexcept { return max_kicks_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::size_t occupied() const noexcept { return occupied_; }
  [[nodiscard]] double load_factor() const noexcept {
    return static_cast<double>(occupied_) / static_cast<double>(slots_.size());
  }
  // Bits per stored item, f / alpha.
  [[nodiscard]] double space_cost() const;
  [[nodiscard]] std::uint64_t failures() const noexcept { return failures_; }
  [[nodiscard]] std::uint32_t slot(std::size_t bucket, std::size_t s) const { return slots_[bucket * b_ + s]; }
  [[nodiscard]] const std::vector<std::uint32_t>& slots() const noexcept { return slots_; }

  static CuckooFilter restore(std::size_t buckets, std::size_t slots_per_bucket, unsigned fp_bits,
                              std::size_t max_kicks, std::uint64_t seed, std::vector<std::uint32_t> slots,
                              std::uint64_t n);

 private:
  bool place(std::size_t bucket, std::uint32_t fp);
  [[nodiscard]] bool holds(std::size_t bucket, std::uint32_t fp) const;

  std::size_t buckets_;
  std::size_t b_;
  unsigned fp_bits_;
  std::size_t max_kicks_;
  std::uint64_t seed_;
  std::vector<std::uint32_t> slots_;
  std::size_t occupied_ = 0;
  std::uint64_t failures_ = 0;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Time-segmented filter: one standard filter per slot of g time units.
// Writers on distinct slots may run concurrently.

class PersistentBF final : public MembershipFilter {
 public:
  PersistentBF(std::int64_t granularity, std::size_t m, std::size_t k, std::uint64_t seed = 0);
  PersistentBF(PersistentBF&& other) noexcept;

  [[nodiscard]] Variant variant() const noexcept override { return Variant::persistent; }
  // Generic insert uses the current clock.
  InsertStatus insert(std::string_view item) override;
  // Generic query covers every slot.
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override;

  void insert_at(std::string_view item, std::int64_t t);
  // Present iff some slot in [slot(t1), slot(t2)] is present; t1 > t2 throws.
  [[nodiscard]] QueryOutcome query_range(std::string_view item, std::int64_t t1, std::int64_t t2) const;
  void set_clock(std::int64_t t) noexcept { clock_ = t; }

  [[nodiscard]] std::int64_t slot_of(std::int64_t t) const noexcept;
  [[nodiscard]] std::int64_t granularity() const noexcept { return g_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::int64_t clock() const noexcept { return clock_; }
  [[nodiscard]] const std::map<std::int64_t, StandardBF>& segments() const noexcept { return segments_; }

  static PersistentBF restore(std::int64_t granularity, std::size_t m, std::size_t k, std::uint64_t seed,
                              std::int64_t clock, std::map<std::int64_t, StandardBF> segments, std::uint64_t n);

 private:
  std::int64_t g_;
  std::size_t m_;
  std::size_t k_;
  std::uint64_t seed_;
  std::int64_t clock_ = 0;
  std::map<std::int64_t, StandardBF> segments_;
  std::unique_ptr<std::mutex> lock_;
};

// ---------------------------------------------------------------------------
// High-dimensional filter: real vectors are quantized and hashed by k
// independently seeded vector hashes into an 8-bit counter array.

class HDBF final : public MembershipFilter {
 public:
  static constexpr unsigned kCounterWidth = 8;

  HDBF(std::size_t m, std::size_t k, unsigned q, double low = 0.0, double high = 1.0, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::high_dimensional; }
  // Byte items are hashed directly with the same k seeds.
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return counters_.size() * kCounterWidth; }

  InsertStatus insert_vector(std::span<const double> v);
  [[nodiscard]] QueryOutcome query_vector(std::span<const double> v) const;
  RemoveResult remove_vector(std::span<const double> v);
  [[nodiscard]] std::vector<std::uint64_t> vector_positions(std::span<const double> v) const;
  [[nodiscard]] std::vector<std::uint64_t> item_positions(std::string_view item) const;

  [[nodiscard]] std::size_t m() const noexcept { return counters_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return seeds_.size(); }
  [[nodiscard]] unsigned q() const noexcept { return hasher_.levels(); }
  [[nodiscard]] double low() const noexcept { return low_; }
  [[nodiscard]] double high() const noexcept { return high_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const CounterVector& counters() const noexcept { return counters_; }

  static HDBF restore(std::size_t k, unsigned q, double low, double high, std::uint64_t seed, CounterVector counters,
                      std::uint64_t n);

 private:
  InsertStatus add(const std::vector<std::uint64_t>& pos);
  [[nodiscard]] QueryOutcome probe(const std::vector<std::uint64_t>& pos) const;
  RemoveResult drop(const std::vector<std::uint64_t>& pos);

  double low_;
  double high_;
  std::uint64_t seed_;
  VectorHasher hasher_;
  std::vector<std::uint64_t> seeds_;
  CounterVector counters_;
};

}  // namespace bloomsketch
