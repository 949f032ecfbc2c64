#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bloomsketch/filter.hpp"

namespace testing {

// A small, fully deterministic, populated instance of the variant. The golden
// files under tests/golden are the serialized form of these.
std::unique_ptr<bloomsketch::MembershipFilter> make_fixture(bloomsketch::Variant v);

// Items that are valid for the variant's generic query (bit strings for the
// distance-sensitive filter, universe keys for the complement filter).
std::vector<std::string> fixture_probes(bloomsketch::Variant v, std::size_t n, std::uint64_t seed);

}  // namespace testing
