#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmab {

using ArmIndex = std::size_t;
using PlayerIndex = std::size_t;
using Round = std::uint64_t;

// Raised for any malformed input to the simulator. `field` names the offending
// configuration entry (or argument) so callers can report it verbatim.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cmab
