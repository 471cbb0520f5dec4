#pragma once

#include <stdexcept>
#include <string>

namespace profdec {

// Bad input: malformed files, out-of-range parameters, inconsistent sequences.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A library invariant did not hold. Always a bug or corrupted state.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace profdec
