#pragma once

#include <string_view>
#include <vector>

#include "bloomsketch/filter.hpp"

namespace bloomsketch {

// One row of the variant trait matrix. Cells read "Yes", "No", or "/" for
// "no false negatives under correct usage".
struct CapabilityRow {
  Variant variant;
  std::string_view name;
  std::string_view main_trait;
  std::string_view counting;
  std::string_view deletion;
  std::string_view false_negatives;
  std::string_view result;
  // False for variants missing from the reference trait table; their cells
  // are our own classification.
  bool in_reference_table;
};

[[nodiscard]] const std::vector<CapabilityRow>& capability_rows();
[[nodiscard]] const CapabilityRow& capability_row(Variant v);

// Reference table rows with no implementation here.
[[nodiscard]] const std::vector<std::string_view>& unimplemented_reference_rows();

}  // namespace bloomsketch
