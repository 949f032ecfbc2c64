#include "bloomsketch/filter.hpp"

#include <algorithm>
#include <string>

#include "bloomsketch/capability_table.hpp"
#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

struct VariantName {
  Variant variant;
  std::string_view name;
};

constexpr VariantName kNames[] = {
    {Variant::standard, "standard"},
    {Variant::counting, "counting"},
    {Variant::spectral, "spectral"},
    {Variant::adaptive, "adaptive"},
    {Variant::yes_no, "yes_no"},
    {Variant::vicbf, "vicbf"},
    {Variant::fingerprint_cbf, "fingerprint_cbf"},
    {Variant::retouched, "retouched"},
    {Variant::accurate_cbf, "accurate_cbf"},
    {Variant::generalized, "generalized"},
    {Variant::multi_class, "multi_class"},
    {Variant::complement, "complement"},
    {Variant::dleft_cbf, "dleft_cbf"},
    {Variant::bfah, "bfah"},
    {Variant::matrix, "matrix"},
    {Variant::compacted, "compacted"},
    {Variant::one_hashing, "one_hashing"},
    {Variant::ultra_fast, "ultra_fast"},
    {Variant::dynamic, "dynamic"},
    {Variant::weighted, "weighted"},
    {Variant::iblt, "iblt"},
    {Variant::shifting, "shifting"},
    {Variant::deletable, "deletable"},
    {Variant::distance_sensitive, "distance_sensitive"},
    {Variant::cuckoo, "cuckoo"},
    {Variant::persistent, "persistent"},
    {Variant::high_dimensional, "high_dimensional"},
};

constexpr std::string_view kBool = "Boolean";
constexpr std::string_view kFreq = "Frequency";
constexpr std::string_view kBoolFreq = "Boolean / Frequency";

const std::vector<CapabilityRow> kRows = {
    {Variant::standard, "Standard Bloom Filter", "Membership query", "No", "No", "No", kBool, true},
    {Variant::cuckoo, "Cuckoo BF", "Using cuckoo hashing in bloom filter", "No", "Yes", "No", kBool, true},
    {Variant::counting, "Counting BF", "Membership query + Item's frequency", "Yes", "Yes", "/", kBoolFreq, true},
    {Variant::dynamic, "Dynamic BF", "Growing dynamically + Allowing Deletions", "Yes", "Yes", "No", kBool, true},
    {Variant::persistent, "Persistent BF", "Supporting temporal membership queries", "No", "No", "No", kBool, true},
    {Variant::spectral, "Spectral BF", "Item frequency queries", "Yes", "Yes", "/", kFreq, true},
    {Variant::dleft_cbf, "D-left Counting BF", "Membership + freq. queries + d-left hashing", "Yes", "Yes", "/",
     kBoolFreq, true},
    {Variant::distance_sensitive, "Distance-Sensitive BF", "Querying the distance to an item of a set", "No", "No",
     "Yes", kBool, true},
    {Variant::generalized, "Generalized BF", "2 groups of Set (1) and Reset (0) hash functions", "No", "No", "Yes",
     kBool, true},
    {Variant::high_dimensional, "High-Dimensional BF", "Mapping dimensional data to counter arrays", "Yes", "Yes", "/",
     kBoolFreq, true},
    {Variant::accurate_cbf, "Accurate Counting BF", "Mapping items to multi-level counter arrays", "Yes", "Yes", "/",
     kBoolFreq, true},
    {Variant::one_hashing, "One-Hashing BF", "Using one hash function and modulo operations for items mapping", "No",
     "No", "No", kBool, true},
    {Variant::retouched, "Retouched BF", "Allowing false negatives to improve the fpp rate", "No", "No", "Yes", kBool,
     true},
    {Variant::deletable, "Deletable BF", "Removing items is based on the probability p_d", "No", "Yes", "No", kBool,
     true},
    {Variant::adaptive, "Adaptive BF", "Incremental dynamic hash function creation", "Yes", "No", "No", kBool, true},
    {Variant::weighted, "Weighted BF", "Items get more bits according to its popularity", "No", "No", "No", kBool,
     true},
    {Variant::iblt, "IBLT", "Difference between two sets + Holding the key and count value for each items", "Yes",
     "Yes", "/", kBoolFreq, true},
    {Variant::vicbf, "VI-CBF", "Membership query + Item's frequency", "Yes", "Yes", "/", kBoolFreq, true},
    {Variant::shifting, "Shifting BF", "Membership query + Association + Multiplicity", "No", "No", "No", kBool, true},
    {Variant::yes_no, "Yes-no BF", "Membership query + false positive elements", "No", "No", "Yes", kBool, true},
    {Variant::fingerprint_cbf, "Fingerprint CBF", "Counters plus XOR-ed fingerprints per cell", "Yes", "Yes", "/",
     kBoolFreq, false},
    {Variant::multi_class, "Multi-Class BF", "Per-class hash counts set by presence probability", "No", "No", "No",
     kBool, false},
    {Variant::complement, "Complement BF", "Second filter over the complement set", "No", "No", "No", kBool, false},
    {Variant::bfah, "BFAH", "One storage address selected by an extra hash", "No", "No", "No", kBool, false},
    {Variant::matrix, "Matrix BF", "One filter row per document for similarity", "No", "No", "No", kBool, false},
    {Variant::compacted, "Compacted BF", "Block-pattern indices for transmission", "No", "No", "Yes", kBool, false},
    {Variant::ultra_fast, "Ultra-Fast BF", "One block of k words per item", "No", "No", "No", kBool, false},
};

const std::vector<std::string_view> kUnimplemented = {"Compressed BF", "Conscious BF", "The Bloomier Filter"};

ResultKind parse_result(std::string_view s) {
  if (s == kFreq) return ResultKind::frequency;
  if (s == kBoolFreq) return ResultKind::boolean_and_frequency;
  return ResultKind::boolean;
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
  for (const auto& entry : kNames) {
    if (entry.variant == v) return entry.name;
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.variant;
  }
  return std::nullopt;
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> variants = [] {
    std::vector<Variant> out;
    for (const auto& entry : kNames) out.push_back(entry.variant);
    return out;
  }();
  return variants;
}

std::string_view to_string(RemoveResult r) noexcept {
  switch (r) {
    case RemoveResult::removed: return "removed";
    case RemoveResult::not_found: return "not_found";
    case RemoveResult::aborted: return "aborted";
    case RemoveResult::not_deletable: return "not_deletable";
  }
  return "unknown";
}

const std::vector<CapabilityRow>& capability_rows() { return kRows; }

const CapabilityRow& capability_row(Variant v) {
  const auto it = std::find_if(kRows.begin(), kRows.end(), [v](const auto& row) { return row.variant == v; });
  if (it == kRows.end()) throw ParameterError("capability_row: unknown variant");
  return *it;
}

const std::vector<std::string_view>& unimplemented_reference_rows() { return kUnimplemented; }

Capabilities capabilities_of(Variant v) noexcept {
  for (const auto& row : kRows) {
    if (row.variant != v) continue;
    return Capabilities{row.counting == "Yes", row.deletion == "Yes", row.false_negatives == "Yes",
                        parse_result(row.result)};
  }
  return {};
}

RemoveResult MembershipFilter::remove(std::string_view) {
  require_deletion();
  throw CapabilityError(std::string(to_string(variant())) + ": remove is not implemented");
}

std::uint64_t MembershipFilter::count_estimate(std::string_view) const {
  require_counting();
  throw CapabilityError(std::string(to_string(variant())) + ": count_estimate is not implemented");
}

void MembershipFilter::require_deletion() const {
  if (!capabilities().deletion) {
    throw CapabilityError(std::string(to_string(variant())) + " does not support deletion");
  }
}

void MembershipFilter::require_counting() const {
  if (!capabilities().counting) {
    throw CapabilityError(std::string(to_string(variant())) + " does not support counting");
  }
}

}  // namespace bloomsketch
