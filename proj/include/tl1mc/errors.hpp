#pragma once

#include <stdexcept>
#include <string>

namespace tl1mc {

/// Base class for everything the library throws.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition or type invariant was violated by the caller.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// SVD failure, divergence, non-finite iterates, non-smooth evaluation points.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. Carries the offending line (1-based) when known.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, long line = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    long line() const noexcept { return line_; }

  private:
    long line_;
};

} // namespace tl1mc
