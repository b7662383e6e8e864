#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pisa {

// Error taxonomy mirrors the CLI exit codes: validation problems exit with 2,
// malformed files with 3, metric-level failures with 4.

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Rejection sampling gave up. Still a validation problem from the caller's view.
class SamplerError : public ValidationError {
 public:
  explicit SamplerError(const std::string& what) : ValidationError(what) {}
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  explicit FormatError(const std::string& what) : std::runtime_error(what) {}

  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_ = 0;
};

class MetricError : public std::runtime_error {
 public:
  explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pisa
