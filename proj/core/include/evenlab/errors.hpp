#pragma once

#include <stdexcept>
#include <string>

namespace evenlab {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or indices that do not agree with the owning NetworkSpec.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Values outside their admissible domain (non-finite, zero input, out of bounds).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A request that would exceed a fixed computational budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_structural(const std::string& what);
[[noreturn]] void throw_validation(const std::string& what);
[[noreturn]] void throw_capacity(const std::string& what);

}  // namespace evenlab
