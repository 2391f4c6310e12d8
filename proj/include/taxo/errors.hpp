#pragma once

#include <stdexcept>
#include <string>

namespace taxo {

// Error taxonomy maps 1:1 onto CLI exit codes (see cli.hpp):
// ConfigError -> 2, DataError -> 3, NumericError -> 4.

// Bad configuration: unknown keys, out-of-range settings, malformed CLI usage.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data: structural taxonomy problems, unknown nodes, parse
// failures, checkpoint integrity or shape mismatches.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: divergence during training, non-finite values.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace taxo
