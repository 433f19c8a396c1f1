#pragma once

#include <stdexcept>
#include <string>

namespace bbmlab {

/// Broad failure classes. They map one-to-one onto the C API status codes
/// and the CLI exit codes.
enum class ErrorKind {
  InvalidArgument,  // bad input or config; CLI exit 2
  Io,               // filesystem trouble; CLI exit 2
  Resource,         // particle budget exceeded; CLI exit 3
  CheckFailed,      // a verification check did not pass; CLI exit 1
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) { return {ErrorKind::InvalidArgument, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::Io, what}; }

}  // namespace bbmlab
