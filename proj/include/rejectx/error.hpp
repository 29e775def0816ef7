#pragma once

#include <stdexcept>
#include <string>

namespace rejectx {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class io_error : public error {
  public:
    using error::error;
};

/// Input violates a precondition (shape mismatch, degenerate data, bad value).
class validation_error : public error {
  public:
    using error::error;
};

}  // namespace rejectx
