#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bloomsketch {

enum class Variant : std::uint8_t {
  standard = 1,
  counting,
  spectral,
  adaptive,
  yes_no,
  vicbf,
  fingerprint_cbf,
  retouched,
  accurate_cbf,
  generalized,
  multi_class,
  complement,
  dleft_cbf,
  bfah,
  matrix,
  compacted,
  one_hashing,
  ultra_fast,
  dynamic,
  weighted,
  iblt,
  shifting,
  deletable,
  distance_sensitive,
  cuckoo,
  persistent,
  high_dimensional,
};

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
[[nodiscard]] std::optional<Variant> parse_variant(std::string_view name) noexcept;
[[nodiscard]] const std::vector<Variant>& all_variants();

enum class ResultKind : std::uint8_t { boolean, frequency, boolean_and_frequency };

struct Capabilities {
  bool counting = false;
  bool deletion = false;
  bool false_negatives_possible = false;
  ResultKind result_kind = ResultKind::boolean;

  friend bool operator==(const Capabilities&, const Capabilities&) = default;
};

// Constant per variant.
[[nodiscard]] Capabilities capabilities_of(Variant v) noexcept;

enum class Verdict : std::uint8_t { absent, present };

struct QueryOutcome {
  Verdict verdict = Verdict::absent;
  bool maybe_false_positive = false;
  std::optional<std::uint64_t> frequency;
  std::vector<std::uint64_t> auxiliary;
  // Set only by the complement filter when both constituent filters matched
  // and the exact set decided the verdict.
  bool needs_oracle = false;

  [[nodiscard]] bool present() const noexcept { return verdict == Verdict::present; }

  static QueryOutcome absent() { return {}; }
  static QueryOutcome maybe_present() {
    QueryOutcome out;
    out.verdict = Verdict::present;
    out.maybe_false_positive = true;
    return out;
  }
};

enum class InsertStatus : std::uint8_t { inserted, failed };

enum class RemoveResult : std::uint8_t {
  removed,
  not_found,
  aborted,        // dynamic filter: item matched in more than one sub-filter
  not_deletable,  // deletable filter: every bit lies in a collision region
};

[[nodiscard]] std::string_view to_string(RemoveResult r) noexcept;

// The interface every variant implements. Items are byte sequences.
//
// A filter instance is single-writer; concurrent const calls are safe as long
// as they are separated from writes by a synchronization point.
class MembershipFilter {
 public:
  virtual ~MembershipFilter() = default;

  [[nodiscard]] virtual Variant variant() const noexcept = 0;
  [[nodiscard]] Capabilities capabilities() const noexcept { return capabilities_of(variant()); }

  virtual InsertStatus insert(std::string_view item) = 0;
  [[nodiscard]] virtual QueryOutcome query(std::string_view item) const = 0;

  // Throws CapabilityError unless capabilities().deletion.
  virtual RemoveResult remove(std::string_view item);
  // Throws CapabilityError unless capabilities().counting.
  [[nodiscard]] virtual std::uint64_t count_estimate(std::string_view item) const;

  // Storage footprint of the sketch itself, used for bits-per-element figures.
  [[nodiscard]] virtual std::size_t memory_bits() const noexcept = 0;

  // Tracked number of successful inserts minus successful removals.
  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }

  [[nodiscard]] bool contains(std::string_view item) const { return query(item).present(); }

 protected:
  void require_deletion() const;
  void require_counting() const;

  std::uint64_t n_ = 0;
};

}  // namespace bloomsketch
