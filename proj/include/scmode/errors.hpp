#pragma once

#include <stdexcept>
#include <string>

namespace scmode {

/// A root finder could not bracket or converge on its target. The message
/// carries the bracket end points and the residuals evaluated there.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation that is supposed to preserve a physical invariant did not.
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A synthesized spectrum does not fit on the frequency grid.
class AliasingError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// The squeezed variance sits below what double precision can resolve next
/// to the antisqueezed one.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scmode
