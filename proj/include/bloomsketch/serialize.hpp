#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bloomsketch/filter.hpp"

namespace bloomsketch {

// File layout (all integers little-endian):
//   "BFSK" | version u8 | variant tag u8 | params length u32 | params block | payload
// The params block is a sequence of u64 scalars (doubles as IEEE-754 bit
// patterns, strings as u64 length + bytes). The payload is a u64 word count
// followed by that many 64-bit words holding the bit and counter arrays in
// their in-memory packing. The compacted filter is the one exception: its
// params block starts with the 7-byte {w, nb, bp} wire header and its
// payload is the packed w-bit index array with no count prefix.
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 10;

// True for every variant tag known to this build.
[[nodiscard]] bool is_serializable(Variant v) noexcept;

// Throws CapabilityError for a non-serializable variant or a filter built on a
// scripted hash family. A multi-class filter is saved without its classifier;
// the loaded copy routes class-less calls to class 0.
[[nodiscard]] std::vector<std::uint8_t> save_bytes(const MembershipFilter& filter);
// Throws FormatError (with the offending byte offset) on bad magic, an
// unknown version or tag, truncation, trailing bytes or inconsistent state.
[[nodiscard]] std::unique_ptr<MembershipFilter> load_bytes(std::span<const std::uint8_t> bytes);

void save_file(const MembershipFilter& filter, const std::string& path);
[[nodiscard]] std::unique_ptr<MembershipFilter> load_file(const std::string& path);

}  // namespace bloomsketch
