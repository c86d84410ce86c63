#pragma once

#include <stdexcept>
#include <string>

namespace qiup {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: out-of-range parameter, malformed file, inconsistent config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition does not hold (sampling too coarse, root not
/// bracketed, vanishing slope, aliasing risk).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qiup
