#pragma once

#include <stdexcept>
#include <string>

namespace chaos {

// Bad user input: malformed config files, unknown kinds, out-of-range levels.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem or codec failure while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chaos
