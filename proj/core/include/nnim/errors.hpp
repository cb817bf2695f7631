#pragma once

#include <stdexcept>
#include <string>

namespace nnim {

/// Bad option values, inconsistent settings. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unusable input data (missing files, bad contents). CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed row in a text input; carries the 1-based line number.
struct ParseError : DataError {
  ParseError(const std::string& path, long line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  long line_number;
};

/// AUC over a single-class cell set has no defined value.
struct DegenerateMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nnim
