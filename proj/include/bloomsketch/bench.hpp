#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bloomsketch/analysis.hpp"
#include "bloomsketch/filter.hpp"

namespace bloomsketch {

// Invalid run configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat : std::uint8_t { csv, json };

[[nodiscard]] std::optional<OutputFormat> parse_format(std::string_view s) noexcept;

struct WorkloadSpec {
  StreamSpec stream{Distribution::uniform, 1.0, 1000, std::uint64_t{1} << 40, true};
  std::uint64_t probes = 100000;
  // Members removed again after the build; needs a deleting variant.
  std::uint64_t deletions = 0;
};

struct RunConfig {
  Variant variant = Variant::standard;
  nlohmann::json params = nlohmann::json::object();
  WorkloadSpec workload;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::csv;
  std::string out;  // empty: standard output
};

// Validates everything (including the variant parameters) before any filter
// is allocated. Unknown keys at any level are rejected. Throws ConfigError.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig load_run_config(const std::string& path);

// Builds an empty filter from the variant parameters. Throws ConfigError for
// unknown, missing or invalid parameters. `members` is consulted only by
// variants that are built from the member set at once (complement) or whose
// defaults derive from it (weighted).
[[nodiscard]] std::unique_ptr<MembershipFilter> make_filter(Variant v, const nlohmann::json& params,
                                                            std::uint64_t seed,
                                                            std::span<const std::string> members = {});

// Variants that only accept specially shaped items get an encoder that maps
// an arbitrary key to a valid item; the result is empty for the others.
[[nodiscard]] std::function<std::string(std::string_view)> item_encoder(Variant v, const nlohmann::json& params,
                                                                        std::uint64_t seed);

// Closed-form prediction for the filter's current state, when there is one.
[[nodiscard]] std::optional<double> predict_fpp(const MembershipFilter& filter, const nlohmann::json& params);

struct BuiltFilter {
  std::unique_ptr<MembershipFilter> filter;
  std::vector<std::string> members;  // encoded items still in the filter
};

// Draws the member stream, inserts it, then applies the deletion workload.
// CapabilityError propagates when the workload needs a missing capability.
[[nodiscard]] BuiltFilter build_filter(const RunConfig& config);

// Build followed by a false-positive trial. With timed = true the probe
// loop is timed and the throughput column is filled; otherwise the report is
// a pure function of (config, seed).
[[nodiscard]] TrialReport run_trial(const RunConfig& config, bool timed);

[[nodiscard]] std::string format_reports(std::span<const TrialReport> reports, OutputFormat format,
                                         std::uint64_t seed);
// One row per implemented variant plus a footnote naming the reference rows
// with no implementation.
[[nodiscard]] std::string capability_matrix(OutputFormat format);

}  // namespace bloomsketch
