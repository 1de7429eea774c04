#pragma once

#include <stdexcept>
#include <string>

namespace udn {

// Invalid or inconsistent configuration (bad keys, bad ranges, unreadable file).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The model produced a physically impossible state (e.g. net power <= 0).
struct ModelViolationError : std::runtime_error {
  explicit ModelViolationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace udn
