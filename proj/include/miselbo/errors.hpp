#pragma once

#include <stdexcept>

namespace miselbo {

// Bad configuration input (unknown target id, malformed member spec, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse (dimension mismatch, empty selection, ...).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite loss or parameters during fitting.
struct FitDivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace miselbo
