#pragma once

#include <stdexcept>
#include <string>

namespace numidx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector, functional or operator is bound to a different space than required.
class DescriptorMismatch : public Error {
 public:
  using Error::Error;
};

/// Operands over different scalar fields were combined.
class FieldMismatch : public Error {
 public:
  using Error::Error;
};

/// Input is structurally valid but degenerate (zero vector, empty keep-set, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A requested computation exceeds a documented size cap (grid dimension, tensor size, ...).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its admissible range.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Malformed descriptor text or exchange file. `field()` names the offending element.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace numidx
