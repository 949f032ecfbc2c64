#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bloomsketch/bit_vector.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/filter.hpp"
#include "bloomsketch/hash.hpp"

namespace bloomsketch {

// ---------------------------------------------------------------------------
// Dynamic filter: a list of counting filters of capacity C each. Inserts go
// to the last (active) one; a fresh one is appended when it is full.

struct MergeReport {
  std::size_t merges = 0;
  std::size_t filters_before = 0;
  std::size_t filters_after = 0;
};

class DynamicBF final : public MembershipFilter {
 public:
  DynamicBF(std::size_t m, std::size_t k, std::uint64_t capacity, std::uint64_t seed = 0);
  // Sub-filters share one hash family, which may be scripted.
  DynamicBF(std::size_t m, std::size_t k, std::uint64_t capacity, HashFamily hashes);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::dynamic; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  // removed when exactly one sub-filter holds the item, not_found when none
  // does, aborted (state unchanged) when several do.
  RemoveResult remove(std::string_view item) override;
  // Sum of the per-sub-filter estimates.
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override;

  // Replaces pairs with n1 + n2 <= C by their cell-wise sum until none remain.
  MergeReport merge();

  [[nodiscard]] const std::vector<CountingBF>& sub_filters() const noexcept { return subs_; }
  [[nodiscard]] std::uint64_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }

  static DynamicBF restore(std::size_t m, std::size_t k, std::uint64_t capacity, HashFamily hashes,
                           std::vector<CountingBF> subs);

 private:
  std::size_t m_;
  std::size_t k_;
  std::uint64_t capacity_;
  HashFamily hashes_;
  std::vector<CountingBF> subs_;
};

// ---------------------------------------------------------------------------
// Weighted filter: per-element hash counts chosen from a query profile.

struct WBFProfileEntry {
  std::string key;
  double query_frequency = 1.0;  // f_e
  double membership = 0.0;       // x_e, likelihood that e is a member
};

// Normalized query frequency r_e of every profile entry.
[[nodiscard]] std::vector<double> wbf_weights(std::span<const WBFProfileEntry> profile);
// Expected false-positive mass sum_e r_e (1 - p)^{k_e}.
[[nodiscard]] double wbf_objective(std::span<const WBFProfileEntry> profile, std::span<const std::size_t> ks,
                                   double p);
// Default per-element hash count round(ln2 * m / n), at least 1.
[[nodiscard]] std::size_t wbf_average_k(std::size_t m, std::size_t n);

// Greedy allocation: start every k_e at 1, then repeatedly give one more
// hash to the element whose objective term drops most (ties by profile
// order, nobody above k_max), until sum k_e = |profile| * k_avg.
[[nodiscard]] std::vector<std::size_t> wbf_allocate(std::span<const WBFProfileEntry> profile, std::size_t k_max,
                                                    std::size_t m, std::size_t n);

class WeightedBF final : public MembershipFilter {
 public:
  // n is the expected member count used to size k_avg.
  WeightedBF(std::size_t m, std::size_t n, std::size_t k_max, std::vector<WBFProfileEntry> profile,
             std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::weighted; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  // Allocated hash count; k_avg for items outside the profile.
  [[nodiscard]] std::size_t hashes_for(std::string_view item) const;
  [[nodiscard]] std::size_t k_avg() const noexcept { return k_avg_; }
  [[nodiscard]] std::size_t k_max() const noexcept { return k_max_; }
  [[nodiscard]] std::size_t expected_n() const noexcept { return expected_n_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return hashes_.seed(); }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
  [[nodiscard]] const std::vector<WBFProfileEntry>& profile() const noexcept { return profile_; }

  static WeightedBF restore(std::size_t n_expected, std::size_t k_max, std::vector<WBFProfileEntry> profile,
                            std::uint64_t seed, BitVector bits, std::uint64_t n);

 private:
  std::size_t expected_n_;
  std::size_t k_max_;
  std::size_t k_avg_;
  std::vector<WBFProfileEntry> profile_;
  std::map<std::string, std::size_t, std::less<>> allocation_;
  HashFamily hashes_;
  BitVector bits_;
};

// ---------------------------------------------------------------------------
// Invertible Bloom lookup table over 64-bit (key, value) pairs. Sums wrap.

struct IBLTListing {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  bool residue = false;  // true when the listing is partial
};

enum class IBLTLookup : std::uint8_t { not_found, found, unknown };

class IBLT final : public MembershipFilter {
 public:
  // m cells in k sub-tables of m / k cells; m must be a multiple of k.
  IBLT(std::size_t m, std::size_t k, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::iblt; }
  // Byte items are stored as key = hash64(item), value = 0.
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return count_.size() * 192; }

  void insert_pair(std::uint64_t key, std::uint64_t value);
  void erase_pair(std::uint64_t key, std::uint64_t value);
  [[nodiscard]] std::pair<IBLTLookup, std::uint64_t> get(std::uint64_t key) const;
  // Peels a copy; the table itself is untouched.
  [[nodiscard]] IBLTListing list_entries() const;

  [[nodiscard]] std::uint64_t item_key(std::string_view item) const;
  [[nodiscard]] std::size_t cell_of(std::uint64_t key, std::size_t table) const;
  [[nodiscard]] bool empty() const noexcept;
  // Pair count up to which listing is expected to succeed (m / 1.3).
  [[nodiscard]] std::size_t threshold() const noexcept;

  [[nodiscard]] std::size_t m() const noexcept { return count_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<std::int64_t>& counts() const noexcept { return count_; }
  [[nodiscard]] const std::vector<std::uint64_t>& key_sums() const noexcept { return key_sum_; }
  [[nodiscard]] const std::vector<std::uint64_t>& value_sums() const noexcept { return value_sum_; }

  static IBLT restore(std::size_t k, std::uint64_t seed, std::vector<std::int64_t> counts,
                      std::vector<std::uint64_t> key_sums, std::vector<std::uint64_t> value_sums, std::uint64_t n);

 private:
  void apply(std::uint64_t key, std::uint64_t value, std::int64_t sign);

  std::size_t k_;
  std::size_t sub_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> table_seeds_;
  std::vector<std::int64_t> count_;
  std::vector<std::uint64_t> key_sum_;
  std::vector<std::uint64_t> value_sum_;
};

// ---------------------------------------------------------------------------
// Shifting filter: k/2 existence bits at h_i mod m and k/2 shifted bits at
// h_i mod m + aux, in an array of m + w_bar - 1 bits so shifts never wrap.

struct ShBFAnswer {
  bool member = false;
  std::vector<std::uint64_t> aux;  // every a in [1, w_bar - 1] whose shifted bits are all set
};

class ShiftingBF final : public MembershipFilter {
 public:
  ShiftingBF(std::size_t m, std::size_t k, std::size_t w_bar = 64, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::shifting; }
  // Membership mode: aux = offset_of(item).
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  // Association mode; aux must lie in [1, w_bar - 1].
  InsertStatus insert(std::string_view item, std::uint64_t aux);
  [[nodiscard]] ShBFAnswer query_aux(std::string_view item) const;
  [[nodiscard]] std::uint64_t offset(std::string_view item) const;
  [[nodiscard]] std::vector<std::uint64_t> base_positions(std::string_view item) const;

  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t w_bar() const noexcept { return w_bar_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return hashes_.seed(); }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }

  static ShiftingBF restore(std::size_t m, std::size_t k, std::size_t w_bar, std::uint64_t seed, BitVector bits,
                            std::uint64_t n);

 private:
  std::size_t m_;
  std::size_t k_;
  std::size_t w_bar_;
  HashFamily hashes_;
  BitVector bits_;
};

}  // namespace bloomsketch
