#pragma once

#include <stdexcept>
#include <string>

namespace vclip {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, failed preconditions, or data that violates an invariant.
/// The CLI maps this to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures. The CLI maps this to exit code 1.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file exists but its bytes do not decode.
class FormatError : public IoError {
 public:
  enum class Kind {
    kNotAFeaturePack,
    kUnsupportedVersion,
    kUnexpectedEnd,
    kCorrupt,
    kMalformedJson,
  };

  FormatError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace vclip
