#pragma once

// Independent transcription of the published trait matrix (filter name,
// counting, deletion, false negatives, result), used as the oracle for the
// capability table.

#include <optional>
#include <string_view>
#include <vector>

#include "bloomsketch/filter.hpp"

namespace testing {

struct ReferenceRow {
  std::string_view name;
  std::optional<bloomsketch::Variant> variant;  // empty: not implemented
  std::string_view c, d, fn, result;
};

inline const std::vector<ReferenceRow>& reference_rows() {
  using V = bloomsketch::Variant;
  static const std::vector<ReferenceRow> rows = {
      {"Standard Bloom Filter", V::standard, "No", "No", "No", "Boolean"},
      {"Cuckoo BF", V::cuckoo, "No", "Yes", "No", "Boolean"},
      {"Counting BF", V::counting, "Yes", "Yes", "/", "Boolean / Frequency"},
      {"Compressed BF", std::nullopt, "No", "No", "No", "Boolean"},
      {"Conscious BF", std::nullopt, "No", "No", "No", "Boolean"},
      {"Dynamic BF", V::dynamic, "Yes", "Yes", "No", "Boolean"},
      {"Persistent BF", V::persistent, "No", "No", "No", "Boolean"},
      {"Spectral BF", V::spectral, "Yes", "Yes", "/", "Frequency"},
      {"D-left Counting BF", V::dleft_cbf, "Yes", "Yes", "/", "Boolean / Frequency"},
      {"The Bloomier Filter", std::nullopt, "Yes", "No", "No", "Frequency of functions"},
      {"Distance-Sensitive BF", V::distance_sensitive, "No", "No", "Yes", "Boolean"},
      {"Generalized BF", V::generalized, "No", "No", "Yes", "Boolean"},
      {"High-Dimensional BF", V::high_dimensional, "Yes", "Yes", "/", "Boolean / Frequency"},
      {"Accurate Counting BF", V::accurate_cbf, "Yes", "Yes", "/", "Boolean / Frequency"},
      {"One-Hashing BF", V::one_hashing, "No", "No", "No", "Boolean"},
      {"Retouched BF", V::retouched, "No", "No", "Yes", "Boolean"},
      {"Deletable BF", V::deletable, "No", "Yes", "No", "Boolean"},
      {"Adaptive BF", V::adaptive, "Yes", "No", "No", "Boolean"},
      {"Weighted BF", V::weighted, "No", "No", "No", "Boolean"},
      {"IBLT", V::iblt, "Yes", "Yes", "/", "Boolean / Frequency"},
      {"VI-CBF", V::vicbf, "Yes", "Yes", "/", "Boolean / Frequency"},
      {"Shifting BF", V::shifting, "No", "No", "No", "Boolean"},
      {"Yes-no BF", V::yes_no, "No", "No", "Yes", "Boolean"},
  };
  return rows;
}

}  // namespace testing
