#pragma once

#include <stdexcept>
#include <string>

namespace exprlbp {

/// Base of every error thrown by the library. The CLI maps the concrete
/// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a format or a precondition (bad PGM header, malformed
/// model row, rect outside an image, dimension mismatch, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Detection was requested and no face survived grouping.
class NoFaceError : public Error {
 public:
  using Error::Error;
};

}  // namespace exprlbp
