#pragma once

#include <stdexcept>
#include <string>

namespace boxlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad parameters, unnormalized boxes,
/// unknown variants). The CLI maps this to exit status 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// CHSH value below the local bound of 2; such boxes lie outside the
/// polytope fragment spanned by the sixteen extreme boxes.
class OutOfFragment : public Error {
 public:
  using Error::Error;
};

/// No nonnegative combination of the sixteen extreme boxes reproduces the box.
class NotInFragment : public Error {
 public:
  using Error::Error;
};

/// An internal cross-check failed mid-run. The CLI maps this to exit status 3.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace boxlab
