#pragma once

#include <stdexcept>
#include <string>

namespace ridgetrack {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-level failures: missing paths, malformed headers, truncated payloads.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Rejected parameter values or malformed configuration input.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Numerical dead ends: zero median gradient norm, collapsed score frames,
/// empty kernel support. The input is structurally valid but carries no
/// usable signal for the requested operation.
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

}  // namespace ridgetrack
