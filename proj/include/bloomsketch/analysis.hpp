#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bloomsketch/filter.hpp"

namespace bloomsketch {

// ---------------------------------------------------------------------------
// Closed-form false-positive predictions.

enum class FormulaId : std::uint8_t {
  sbf,                 // (1 - (1 - 1/m)^{kn})^k, or its exponential form
  yes_no,              // yes-filter rate times no-filter rate
  bh,                  // Bh variable-increment counters
  vicbf,               // single variable-increment counter
  fpcbf,               // counters plus XOR fingerprints
  retouched,           // f_P * d1^s after s random clearings
  acbf,                // optimal first level 4m - kn
  generalized,         // p^{l1} (1-p)^{l2}
  multi_class,         // per-class rate
  complement,          // joint-positive rate P(S^c) f + P(S) f_c
  shifting,            // (1-p)^{k/2} (1 - p + p^2/(w-1))^{k/2}
  dynamic,             // growing list of counting filters
  weighted,            // uniform-profile objective (1-p)^k
  deletable,           // probability an item is deletable
  cuckoo_space,        // f / alpha bits per item (a cost, not a probability)
  persistent_range,    // 1 - (1 - eps)^slots
  high_dimensional,    // (1 - e^{-kn/m})^k
};

[[nodiscard]] const std::vector<FormulaId>& all_formulas();
[[nodiscard]] std::string_view to_string(FormulaId id) noexcept;
[[nodiscard]] std::optional<FormulaId> parse_formula(std::string_view name) noexcept;
// Parameter names each formula reads; optional ones are marked with '?'.
[[nodiscard]] std::vector<std::string_view> formula_parameters(FormulaId id);
// True when the value is a probability and must lie in [0, 1].
[[nodiscard]] bool formula_is_probability(FormulaId id) noexcept;
// Formulas associated with a variant; never empty. Variants without an
// equation of their own map to the standard formula of their base array.
[[nodiscard]] std::vector<FormulaId> formulas_for(Variant v);
// The formula that predicts the variant's false-positive rate, if one does.
[[nodiscard]] std::optional<FormulaId> predictive_formula(Variant v) noexcept;

using FormulaParams = std::map<std::string, double, std::less<>>;

// Throws ParameterError on a missing or invalid parameter and std::logic_error
// if a probability formula leaves [0, 1].
[[nodiscard]] double analytic_fpp(FormulaId id, const FormulaParams& params);

// Building blocks, exposed for tests and for composite predictions.
[[nodiscard]] double sbf_fpp(double m, double k, double n, bool exact = true);
[[nodiscard]] double gbf_reset_probability(double m, double k1, bool exact = true);
[[nodiscard]] double gbf_set_probability(double m, double k1, double k2, bool exact = true);
// Probability a bit is 0 after n inserts starting from a zero-fraction p0.
[[nodiscard]] double gbf_zero_probability(double m, double k1, double k2, double n, double p0);
[[nodiscard]] double dbf_fpp(double m, double k, double capacity, double total);
// Both forms of the deletability probability: the literal one and
// 1 - (1 - (1 - p_c)^{m/r})^k.
[[nodiscard]] double deletable_probability(double m, double k, double n, double regions, bool literal);
// Smallest h with P(X > h) < 1e-9 for X ~ Binomial(nk, 1/m).
[[nodiscard]] std::size_t bh_default_cap(double m, double k, double n);

// ---------------------------------------------------------------------------
// Empirical measurement.

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact (Clopper-Pearson) two-sided binomial interval.
[[nodiscard]] Interval binomial_interval(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

struct TrialReport {
  std::string variant;
  std::size_t m = 0;  // variant's own size parameter
  std::size_t k = 0;
  std::uint64_t n = 0;
  double bits_per_element = 0.0;
  std::optional<double> predicted;
  double measured_fpp = 0.0;
  Interval ci;
  std::uint64_t n_probes = 0;
  std::uint64_t false_positives = 0;
  std::optional<double> throughput;  // queries per second, only when timed
};

// Non-member probe keys; disjoint from every key produced by generate_stream.
[[nodiscard]] std::string probe_key(std::uint64_t seed, std::uint64_t i);
[[nodiscard]] std::string member_key(std::uint64_t id);

struct ProbeOptions {
  bool time_queries = false;
  // Maps a probe key to the item actually queried (e.g. point encodings).
  std::function<std::string(std::string_view)> encode;
};

// Queries n_probes fresh non-members. The filter must already hold `members`,
// which is used only for the bits-per-element figure and disjointness checks.
[[nodiscard]] TrialReport empirical_fpp(const MembershipFilter& filter, std::span<const std::string> members,
                                        std::uint64_t n_probes, std::uint64_t seed,
                                        std::optional<double> predicted = std::nullopt, ProbeOptions opts = {});

// ---------------------------------------------------------------------------
// Synthetic workloads.

enum class Distribution : std::uint8_t { uniform, zipf };

struct StreamSpec {
  Distribution dist = Distribution::uniform;
  double zipf_s = 1.0;
  std::uint64_t n = 0;
  std::uint64_t universe = 0;
  bool unique = false;  // draw without replacement (uniform only)
};

// Item ids in [0, universe). Zipf rank r (1-based) has weight r^{-s} and maps to id r-1.
[[nodiscard]] std::vector<std::uint64_t> generate_ids(const StreamSpec& spec, std::uint64_t seed);
// Same draws rendered as member keys.
[[nodiscard]] std::vector<std::string> generate_stream(const StreamSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Equal-budget comparison across variants.

struct BudgetCell {
  Variant variant;
  double bits_per_element = 0.0;
  std::optional<TrialReport> report;
  std::string error;  // set when the variant has no budget sizing
};

// Variants sized purely from bits per element.
[[nodiscard]] bool supports_budget(Variant v) noexcept;
[[nodiscard]] std::vector<BudgetCell> compare_budget(std::span<const Variant> variants,
                                                     std::span<const double> bits_per_element, std::uint64_t n,
                                                     std::uint64_t seed, std::uint64_t n_probes = 100000);

}  // namespace bloomsketch
