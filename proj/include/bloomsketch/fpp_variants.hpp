#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bloomsketch/bit_vector.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/counter_vector.hpp"
#include "bloomsketch/filter.hpp"
#include "bloomsketch/hash.hpp"

namespace bloomsketch {

// ---------------------------------------------------------------------------
// Yes-no filter: a p-bit yes-filter plus r small no-filters of q bits that
// record items known to be false positives. An item lands in no-filter
// base_hash(item) mod r.

class YesNoBF final : public MembershipFilter {
 public:
  YesNoBF(std::size_t p, std::size_t k, std::size_t q, std::size_t r, std::size_t k_prime,
          HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::yes_no; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override;

  // Records item in its no-filter. Returns false (and changes nothing) when
  // the item does not currently pass the yes-filter.
  bool report_false_positive(std::string_view item);

  [[nodiscard]] bool yes_positive(std::string_view item) const;
  [[nodiscard]] bool no_positive(std::string_view item) const;
  [[nodiscard]] std::size_t select(std::string_view item) const;

  [[nodiscard]] std::size_t p() const noexcept { return yes_.size(); }
  [[nodiscard]] std::size_t q() const noexcept { return q_; }
  [[nodiscard]] std::size_t r() const noexcept { return no_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t k_prime() const noexcept { return k_prime_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& yes_bits() const noexcept { return yes_; }
  [[nodiscard]] const std::vector<BitVector>& no_bits() const noexcept { return no_; }
  [[nodiscard]] std::uint64_t reported() const noexcept { return reported_; }

  static YesNoBF restore(BitVector yes, std::vector<BitVector> no, std::size_t k, std::size_t k_prime,
                         HashFamily hashes, std::uint64_t n, std::uint64_t reported);

 private:
  std::size_t k_;
  std::size_t q_;
  std::size_t k_prime_;
  HashFamily hashes_;
  HashFamily no_hashes_;
  BitVector yes_;
  std::vector<BitVector> no_;
  std::uint64_t reported_ = 0;
};

// ---------------------------------------------------------------------------
// Variable-increment counting filter. Every (item, hash i) pair also draws an
// increment v from L. Bh cells keep c1 = number of increments and c2 = their
// sum; VI cells keep only the sum.

enum class VIScheme : std::uint8_t { bh, vi };

// The membership test for one cell. `saturated` cells always pass.
// Throws ParameterError if v is not in L.
[[nodiscard]] bool vicbf_membership_check(std::uint64_t c1, std::uint64_t c2, std::uint64_t v,
                                          std::span<const std::uint64_t> L, VIScheme scheme,
                                          bool saturated = false);

// True if `target` is a sum of exactly `count` elements of L (with repetition),
// or of any number of them when count is empty.
[[nodiscard]] bool representable(std::uint64_t target, std::optional<std::uint64_t> count,
                                 std::span<const std::uint64_t> L);

class VICBF final : public MembershipFilter {
 public:
  // For the Bh scheme c1 uses c1_bits and its all-ones value marks a
  // saturated cell. For the VI scheme c1_bits is ignored.
  VICBF(std::size_t m, std::size_t k, VIScheme scheme = VIScheme::bh, std::vector<std::uint64_t> L = {2, 3, 4, 5},
        unsigned c1_bits = 2, unsigned c2_bits = 4, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::vicbf; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  // Upper bound on the multiplicity: min over cells of c1 (Bh) or c2 / v (VI).
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override;

  [[nodiscard]] VIScheme scheme() const noexcept { return scheme_; }
  [[nodiscard]] std::size_t m() const noexcept { return c2_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const std::vector<std::uint64_t>& increments() const noexcept { return L_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const CounterVector& c1() const noexcept { return c1_; }
  [[nodiscard]] const CounterVector& c2() const noexcept { return c2_; }
  [[nodiscard]] bool cell_saturated(std::size_t i) const noexcept;
  [[nodiscard]] std::uint64_t saturation_events() const noexcept { return saturation_events_; }

  // Position and increment drawn by hash function i.
  [[nodiscard]] std::vector<std::pair<std::uint64_t, std::uint64_t>> probes(std::string_view item) const;

  static VICBF restore(VIScheme scheme, std::vector<std::uint64_t> L, CounterVector c1, CounterVector c2,
                       std::size_t k, HashFamily hashes, std::uint64_t n, std::uint64_t saturation_events);

 private:
  void saturate(std::size_t i);

  std::size_t k_;
  VIScheme scheme_;
  std::vector<std::uint64_t> L_;
  HashFamily hashes_;
  CounterVector c1_;
  CounterVector c2_;
  std::uint64_t saturation_events_ = 0;
};

// ---------------------------------------------------------------------------
// Counting filter whose cells also hold the XOR of the fingerprints of the
// items counted there. A cell with count 1 must hold the probe's fingerprint.

class FPCBF final : public MembershipFilter {
 public:
  FPCBF(std::size_t m, std::size_t k, unsigned counter_bits = 4, unsigned fp_bits = 8,
        HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::fingerprint_cbf; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override {
    return counters_.size() * (counters_.width() + fps_.width());
  }

  [[nodiscard]] std::size_t m() const noexcept { return counters_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const CounterVector& counters() const noexcept { return counters_; }
  [[nodiscard]] const CounterVector& fingerprints() const noexcept { return fps_; }
  [[nodiscard]] std::uint32_t item_fingerprint(std::string_view item) const;

  static FPCBF restore(CounterVector counters, CounterVector fps, std::size_t k, HashFamily hashes, std::uint64_t n);

 private:
  std::size_t k_;
  HashFamily hashes_;
  CounterVector counters_;
  CounterVector fps_;
};

// ---------------------------------------------------------------------------
// Standard filter with bit clearing: trading false negatives for fewer false
// positives.

struct ClearReport {
  std::vector<std::uint64_t> cleared;  // bit indices, in clearing order
  std::size_t requested = 0;
  bool clamped = false;  // random(s) asked for more bits than were set
};

class RetouchedBF final : public MembershipFilter {
 public:
  RetouchedBF(std::size_t m, std::size_t k, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::retouched; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return base_.memory_bits(); }

  // Clears s set bits chosen uniformly (seeded).
  ClearReport clear_random(std::size_t s, std::uint64_t seed);
  // For each item that still queries positive, clears its lowest-index set bit.
  ClearReport clear_targeted(std::span<const std::string> false_positives);

  [[nodiscard]] const StandardBF& base() const noexcept { return base_; }
  [[nodiscard]] const std::vector<std::uint64_t>& cleared_log() const noexcept { return cleared_; }

  static RetouchedBF restore(StandardBF base, std::vector<std::uint64_t> cleared);

 private:
  explicit RetouchedBF(StandardBF base);

  StandardBF base_;
  std::vector<std::uint64_t> cleared_;
};

// ---------------------------------------------------------------------------
// Accurate counting filter: the level-1 bit array answers membership; each
// deeper level holds one bit per set bit of the level above, addressed by
// rank, so a counter is the length of its chain of ones. Chains that run
// past the last level continue in a small exact overflow map.

// Level-1 size that maximizes accuracy for a budget of m 4-bit counters.
[[nodiscard]] std::uint64_t acbf_optimal_first_level(std::uint64_t m, std::uint64_t k, std::uint64_t n);

class ACBF final : public MembershipFilter {
 public:
  ACBF(std::size_t s1, std::size_t k, std::size_t levels = 4, HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::accurate_cbf; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  RemoveResult remove(std::string_view item) override;
  [[nodiscard]] std::uint64_t count_estimate(std::string_view item) const override;
  // Level-1 bits plus the geometric per-level capacities and the overflow map.
  [[nodiscard]] std::size_t memory_bits() const noexcept override;

  [[nodiscard]] std::uint64_t counter(std::size_t pos) const;
  [[nodiscard]] std::size_t s1() const noexcept { return levels_.front().size(); }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t level_count() const noexcept { return levels_.size(); }
  [[nodiscard]] const std::vector<BitVector>& levels() const noexcept { return levels_; }
  [[nodiscard]] const std::map<std::uint64_t, std::uint64_t>& overflow() const noexcept { return overflow_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }

  static ACBF restore(std::vector<BitVector> levels, std::map<std::uint64_t, std::uint64_t> overflow,
                      std::size_t k, HashFamily hashes, std::uint64_t n);

 private:
  void increment(std::size_t pos);
  void decrement(std::size_t pos);

  std::size_t k_;
  HashFamily hashes_;
  std::vector<BitVector> levels_;
  std::map<std::uint64_t, std::uint64_t> overflow_;
};

// ---------------------------------------------------------------------------
// Generalized filter: k1 reset functions g clear bits, k2 set functions h set
// them; where an h position collides with a g position of the same item, the
// reset wins. The array may start in any state.

struct GBFTouch {
  std::vector<std::uint64_t> reset;  // distinct g positions
  std::vector<std::uint64_t> set;    // distinct h positions not in reset
};

class GeneralizedBF final : public MembershipFilter {
 public:
  GeneralizedBF(std::size_t m, std::size_t k1, std::size_t k2, HashFamily hashes = HashFamily{});
  // Initial array with each bit set independently with probability one_fraction.
  GeneralizedBF(std::size_t m, std::size_t k1, std::size_t k2, double one_fraction, std::uint64_t init_seed,
                HashFamily hashes = HashFamily{});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::generalized; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  [[nodiscard]] GBFTouch touch(std::string_view item) const;
  void set_bits(BitVector bits);

  [[nodiscard]] std::size_t m() const noexcept { return bits_.size(); }
  [[nodiscard]] std::size_t k1() const noexcept { return k1_; }
  [[nodiscard]] std::size_t k2() const noexcept { return k2_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }

  static GeneralizedBF restore(BitVector bits, std::size_t k1, std::size_t k2, HashFamily hashes, std::uint64_t n);

 private:
  std::size_t k1_;
  std::size_t k2_;
  HashFamily hashes_;
  HashFamily set_hashes_;
  BitVector bits_;
};

// ---------------------------------------------------------------------------
// Multi-class filter: one bit array, with a per-class hash count.

class MultiClassBF final : public MembershipFilter {
 public:
  using Classifier = std::function<std::size_t(std::string_view)>;

  // class_k[i] is the hash count of class i. The classifier routes the
  // class-less insert/query calls; by default everything is class 0.
  MultiClassBF(std::size_t m, std::vector<std::size_t> class_k, HashFamily hashes = HashFamily{},
               Classifier classifier = {});

  [[nodiscard]] Variant variant() const noexcept override { return Variant::multi_class; }
  InsertStatus insert(std::string_view item) override;
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override { return bits_.size(); }

  InsertStatus insert(std::string_view item, std::size_t cls);
  [[nodiscard]] QueryOutcome query(std::string_view item, std::size_t cls) const;
  [[nodiscard]] std::vector<std::uint64_t> positions(std::string_view item, std::size_t cls) const;

  [[nodiscard]] std::size_t m() const noexcept { return bits_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& class_k() const noexcept { return class_k_; }
  [[nodiscard]] const HashFamily& hashes() const noexcept { return hashes_; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
  [[nodiscard]] std::size_t classify(std::string_view item) const;

  static MultiClassBF restore(BitVector bits, std::vector<std::size_t> class_k, HashFamily hashes, std::uint64_t n);

 private:
  std::vector<std::size_t> class_k_;
  HashFamily hashes_;
  Classifier classifier_;
  BitVector bits_;
};

// ---------------------------------------------------------------------------
// Complement filter: a filter over S and a second one over U \ S for a finite
// universe U. When both answer positive an exact copy of S decides.

class ComplementBF final : public MembershipFilter {
 public:
  ComplementBF(std::span<const std::string> members, std::span<const std::string> universe, std::size_t m,
               std::size_t k, std::size_t m_c, std::size_t k_c, std::uint64_t seed = 0);

  [[nodiscard]] Variant variant() const noexcept override { return Variant::complement; }
  // The structure is built once; insert throws CapabilityError.
  InsertStatus insert(std::string_view item) override;
  // Throws InputError for items outside the universe.
  [[nodiscard]] QueryOutcome query(std::string_view item) const override;
  [[nodiscard]] std::size_t memory_bits() const noexcept override {
    return filter_s_.memory_bits() + filter_c_.memory_bits();
  }

  [[nodiscard]] const StandardBF& filter_s() const noexcept { return filter_s_; }
  [[nodiscard]] const StandardBF& filter_complement() const noexcept { return filter_c_; }
  [[nodiscard]] std::size_t universe_size() const noexcept { return universe_.size(); }
  [[nodiscard]] std::vector<std::string> members() const;
  [[nodiscard]] std::vector<std::string> universe() const;

 private:
  StandardBF filter_s_;
  StandardBF filter_c_;
  std::unordered_set<std::string> members_;
  std::unordered_set<std::string> universe_;
};

}  // namespace bloomsketch
