#pragma once

#include <stdexcept>
#include <string>

namespace wildgan {

// Error taxonomy mirrored by the CLI exit codes: usage 2, data validation 3,
// numeric failure 4. Shape and I/O problems count as validation.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : ValidationError {
  explicit ShapeError(const std::string& msg) : ValidationError(msg) {}
};

struct IoError : ValidationError {
  explicit IoError(const std::string& msg) : ValidationError(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wildgan
