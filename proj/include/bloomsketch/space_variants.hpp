#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bloomsketch/bit_vector.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/filter.hpp"
#include "bloomsketch/hash.hpp"

namespace bloomsketch {

// ---------------------------------------------------------------------------
// d-left counting filter. An item's fingerprint (bucket_bits + r bits) is
// permuted once per subtable; the high bits pick the bucket and the low r bits
// are the stored remainder.

struct DlCBFCandidate {
  std::uint32_t bucket;
  std::uint32_t remainder;
};

class DlCBF final : public MembershipFilter {
 public:
  // b (buckets per subtable) must be a power of two.
  DlCBF(std::size_t d, std::size_t b, std::size_t cells_per_bucket, unsigned remainder_bits,
        unsigned counter_bits = 2, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::dleft_cbf; }
  // Returns failed, and counts an overflow, when every candidate bucket is full.
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override;

  [[nodiscard]] std::vector<DlCBFCandidate> candidates(std::string_view item) const;
  [[nodiscard]] std::size_t bucket_load(std::size_t table, std::size_t bucket) const;
  [[nodiscard]] std::size_t max_bucket_load() const;

  [[nodiscard]] std::size_t d() const noexcept { return d_; }
  [[nodiscard]] std::size_t b() const noexcept { return b_; }
  [[nodiscard]] std::size_t cells_per_bucket() const noexcept { return w_; }
  [[nodiscard]] unsigned remainder_bits() const noexcept { return r_; }
  [[nodiscard]] unsigned counter_bits() const noexcept { return c_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t overflows() const noexcept { return overflows_; }
  [[nodiscard]] std::uint64_t saturation_events() const noexcept { return saturation_events_; }

  // Cell arrays in (table, bucket, cell) order; counter 0 marks an empty cell.
  [[nodiscard]] const std::vector<std::uint32_t>& remainders() const noexcept { return rem_; }
  [[nodiscard]] const std::vector<std::uint32_t>& cell_counters() const noexcept { return cnt_; }

  static DlCBF restore(std::size_t d, std::size_t b, std::size_t cells_per_bucket, unsigned remainder_bits,
                       unsigned counter_bits, std::uint64_t seed, std::vector<std::uint32_t> remainders,
                       std::vector<std::uint32_t> counters, std::uint64_t n, std::uint64_t overflows);

 private:
  [[nodiscard]] std::size_t cell_base(std::size_t table, std::size_t bucket) const noexcept {
    return (table * b_ + bucket) * w_;
  }
  // Index of the cell holding the remainder, if any, across all candidates.
  [[nodiscard]] std::optional<std::size_t> find(const std::vector<DlCBFCandidate>& cand) const;

  std::size_t d_;
  std::size_t b_;
  std::size_t w_;
  unsigned r_;
  unsigned c_;
  unsigned bucket_bits_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> mul_;
  std::vector<std::uint64_t> add_;
  std::vector<std::uint32_t> rem_;
  std::vector<std::uint32_t> cnt_;
  std::uint64_t overflows_ = 0;
  std::uint64_t saturation_events_ = 0;
};

// ---------------------------------------------------------------------------
// Filter with an additional hash: each of the m bit positions doubles as a
// memory address, and one extra function picks which of the item's k
// addresses stores its payload.

struct BFAHEntry {
  std::string item;
  std::string payload;
  friend bool operator==(const BFAHEntry&, const BFAHEntry&) = default;
};

class BFAH final : public MembershipFilter {
 public:
  BFAH(std::size_t m, std::size_t k, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::bfah; }
  // Stores the item itself as payload.
  InsertStatus insert(std::string_view item) override;
  // Present when all k bits are set and the selected address holds a payload.
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  InsertStatus insert(std::string_view item, std::string payload);
  // The item's storage address: one of its k positions, chosen by the extra
  // function (hash index k of the family, mod k).
  [[nodiscard]] std::uint64_t address(std::string_view item) const;
  // Payloads chained at the item's selected address.
  [[nodiscard]] std::vector<std::string> lookup(std::string_view item) const;

  // Inserts whose address already held an entry of another item.
  [[nodiscard]] std::uint64_t collisions() const noexcept { return collisions_; }
  [[nodiscard]] bool last_insert_collided() const noexcept { return last_collided_; }

  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
  [[nodiscard]] const std::map<std::uint64_t, std::vector<BFAHEntry>>& slots() const noexcept { return slots_; }

  static BFAH restore(BitVector bits, std::size_t k, HashFamily hashes,
                      std::map<std::uint64_t, std::vector<BFAHEntry>> slots, std::uint64_t n,
                      std::uint64_t collisions);

 private:
  std::size_t k_;
  HashFamily hashes_;
  BitVector bits_;
  std::map<std::uint64_t, std::vector<BFAHEntry>> slots_;
  std::uint64_t collisions_ = 0;
  bool last_collided_ = false;
};

// ---------------------------------------------------------------------------
// Matrix filter: one standard-filter row per document, built from the
// document's chunks. Similarity is the popcount of the AND of two rows.

enum class ChunkStyle : std::uint8_t { word_shingles, lines };

struct ChunkerConfig {
  ChunkStyle style = ChunkStyle::word_shingles;
  std::size_t shingle_words = 5;
  std::size_t stride = 1;
};

// Windows that would run past the last word are dropped. A document with no
// words yields a single empty chunk so that it still occupies a row.
[[nodiscard]] std::vector<std::string> chunk_document(std::string_view text, const ChunkerConfig& config);

struct Similarity {
  std::size_t and_popcount = 0;
  double ratio = 0.0;
  bool similar = false;
};

class MatrixBF final : public MembershipFilter {
 public:
  MatrixBF(std::size_t m, std::size_t k, ChunkerConfig chunker = {}, std::size_t threshold = 0,
           HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::matrix; }
  // Adds the item as a new document row.
  InsertStatus insert(std::string_view document) override;
  // Present when some row holds every chunk of the document.
  [[nodiscard]] QueryOutcome query(std::string_view document) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return rows_.size() * m_; }

  std::size_t add_document(std::string_view text);
  // Throws InputError for an unknown document id.
  [[nodiscard]] Similarity similarity(std::size_t i, std::size_t j) const;
  [[nodiscard]] StandardBF row_for(std::string_view text) const;

  [[nodiscard]] std::size_t documents() const noexcept { return rows_.size(); }
  [[nodiscard]] const StandardBF& row(std::size_t i) const;
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t threshold() const noexcept { return threshold_; }
  [[nodiscard]] const ChunkerConfig& chunker() const noexcept { return chunker_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }

  static MatrixBF restore(std::size_t m, std::size_t k, ChunkerConfig chunker, std::size_t threshold,
                          HashFamily hashes, std::vector<BitVector> rows);

 private:
  std::size_t m_;
  std::size_t k_;
  ChunkerConfig chunker_;
  std::size_t threshold_;
  HashFamily hashes_;
  std::vector<StandardBF> rows_;
};

// ---------------------------------------------------------------------------
// Compacted filter. A standard filter of m bits is cut into nb blocks of
// bp = m/nb bits; pattern S_i collects bit i of every block and is encoded as
// one w-bit index. Block ids are 1-based so 0 can mean "no ones"; 2^w - 1
// means "treat as all ones".
//
// Rule mode: 0 ones -> 0; one 1 -> its block id; at least half ones ->
// 2^w - 1; otherwise the id of a randomly chosen one-holding block.
// Value mode: a pattern whose value is below 2^w - 1 is stored verbatim (block
// j is bit j); anything else becomes 2^w - 1.

enum class CompactionMode : std::uint8_t { rules, value };

struct CompactionStats {
  std::array<std::uint64_t, 4> rule_hits{};  // patterns per rule (value mode: verbatim in [1])
  std::uint64_t zeros_to_ones = 0;            // bits the decoded filter gains
  std::uint64_t ones_to_zeros = 0;            // bits it loses
};

class CompactedBF final : public MembershipFilter {
 public:
  [[nodiscard]] Variant variant() const noexcept override { return Variant::compacted; }
  // The compacted form is read-only; insert throws CapabilityError.
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return indices_.size() * w_; }

  [[nodiscard]] unsigned w() const noexcept { return w_; }
  [[nodiscard]] std::size_t nb() const noexcept { return nb_; }
  [[nodiscard]] std::size_t bp() const noexcept { return indices_.size(); }
  [[nodiscard]] CompactionMode mode() const noexcept { return mode_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const std::vector<std::uint32_t>& indices() const noexcept { return indices_; }
  [[nodiscard]] const CompactionStats& stats() const noexcept { return stats_; }

  // Raw wire form: 7-byte header {w:u8, nb:u16, bp:u32} then the packed indices.
  [[nodiscard]] std::vector<std::uint8_t> to_wire() const;
  // Throws FormatError on truncation or an index that names no block.
  static CompactedBF from_wire(std::span<const std::uint8_t> bytes, std::size_t k, HashFamily hashes,
                               CompactionMode mode = CompactionMode::rules);

  static CompactedBF from_indices(unsigned w, std::size_t nb, std::vector<std::uint32_t> indices, std::size_t k,
                                  HashFamily hashes, CompactionMode mode, std::uint64_t n);

 private:
  friend CompactedBF compact(const StandardBF& bf, std::size_t nb, unsigned w, std::uint64_t seed,
                             CompactionMode mode);
  CompactedBF(unsigned w, std::size_t nb, std::vector<std::uint32_t> indices, std::size_t k, HashFamily hashes,
              CompactionMode mode);

  unsigned w_;
  std::size_t nb_;
  std::vector<std::uint32_t> indices_;
  std::size_t k_;
  HashFamily hashes_;
  CompactionMode mode_;
  CompactionStats stats_;
  BitVector decoded_;
};

// Requires m divisible by nb, 2 <= nb <= 2^w - 2, w < nb, w <= 16.
[[nodiscard]] CompactedBF compact(const StandardBF& bf, std::size_t nb, unsigned w, std::uint64_t seed,
                                  CompactionMode mode = CompactionMode::rules);
// Throws FormatError for an index that names no block.
[[nodiscard]] StandardBF reconstruct(const CompactedBF& cbf);

}  // namespace bloomsketch
