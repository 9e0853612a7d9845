#pragma once

#include <stdexcept>
#include <string>

namespace lipnorm {

/// Malformed input: bad dimensions, invalid metric, unknown point names.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration or search would exceed a configured size cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine produced a result that failed its own re-verification.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lipnorm
