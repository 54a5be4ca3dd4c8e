#ifndef PFRL_ERRORS_HPP_
#define PFRL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pfrl {

// Base of every error raised by the library. Callers that only need to know
// "something failed" catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// All surface samples of the plug sit deeper inside the socket than the
// cavity is deep, so no meaningful witness pair exists.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class SteppedTerminalEpisode : public Error {
 public:
  using Error::Error;
};

class MissingPrivilegedData : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

class UnknownVariant : public Error {
 public:
  using Error::Error;
};

class ChecksumMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pfrl

#endif  // PFRL_ERRORS_HPP_
