#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bezlane {

/// Curve order not supported by an operation (e.g. cutting a non-cubic).
class UnsupportedOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Points do not span a 2D region (all collinear or fewer than three distinct).
class DegeneratePolygonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity needed as a divisor is too close to zero to be meaningful.
class NumericalDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed annotation text. `location` is a 1-based line number or a byte
/// offset depending on the format.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : std::runtime_error(what), location_(location) {}
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid record whose fields disagree with each other.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bezlane
