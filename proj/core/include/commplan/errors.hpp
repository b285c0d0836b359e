#pragma once

#include <stdexcept>
#include <string>

namespace commplan {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigensolver or factorisation failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Coincident robot positions where a direction or distance derivative is needed.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Message sent to a robot that is not a current communication neighbour.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace commplan
