#pragma once

#include <stdexcept>
#include <string>

namespace su2depol {

// Bad user input: unknown flags, malformed state specs, inconsistent config.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical invariant failed at runtime (trace drift, instability, ...).
struct NumericalCheckError : std::runtime_error {
  explicit NumericalCheckError(const std::string& msg) : std::runtime_error(msg) {}
};

// File system / serialization failure; message carries the path.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace su2depol
