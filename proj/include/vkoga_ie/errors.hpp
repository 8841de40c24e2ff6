#pragma once

#include <stdexcept>
#include <string>

namespace vkoga_ie {

// Malformed arguments: dimension mismatch, out-of-range configuration values.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Point sets that would make a kernel matrix singular (exact duplicates).
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

// Identical training inputs mapped to different targets.
class DataInconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model files that cannot be read back (truncated, wrong version, bad shapes).
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A greedy basis update was asked to pivot on a power value at or below the floor.
class NearSingularPivotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vkoga_ie
