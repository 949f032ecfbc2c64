#pragma once

#include <stdexcept>
#include <string>

namespace bloomsketch {

// Invalid construction or call parameters (m < 2, k = 0, f out of range, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed caller data: NaN vector components, unknown document ids,
// items outside a declared universe.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation is not supported by this variant (e.g. remove on a standard filter).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Serialized bytes could not be decoded.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace bloomsketch
