#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace airsig {

// CSV / config / manifest parse failure. Rows are reported 1-based,
// counting the header as row 1.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what),
        row_(row) {}
  explicit ParseError(const std::string& what)
      : std::runtime_error(what), row_(0) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Triangulation asked for an occluded observation.
class OcclusionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Disparity below the resolvable threshold; depth is undefined.
class DegenerateDepthError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Too few samples to fit an interpolating spline.
class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Trace rendering found no usable points.
class EmptyTraceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File could not be opened / read / written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace airsig
