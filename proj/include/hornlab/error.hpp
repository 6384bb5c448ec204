#pragma once

#include <stdexcept>
#include <string>

namespace hornlab {

// Base for every failure the library reports by exception. Outcomes that are
// data (basin verdicts, domain cells) are never thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point was handed to a map outside its trusted evaluation disk.
class OutsideDisk : public Error {
 public:
  using Error::Error;
};

// Singular evaluation: a pole, a non-invertible change of variable, a
// non-finite result.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

class NewtonFailure : public Error {
 public:
  using Error::Error;
};

// The germ at 0 is not tangent to the identity, or is degenerate in a way the
// requested operation does not support.
class NotParabolic : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A numerical certificate (constancy, overlap agreement, stabilization) did not
// hold to the requested tolerance.
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace hornlab
