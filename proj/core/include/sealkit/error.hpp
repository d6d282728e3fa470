#pragma once

#include <stdexcept>
#include <string>

namespace sealkit {

enum class ErrorCode {
  kInvalidArgument,  // caller broke a precondition
  kNotFound,         // missing file, session, record
  kDataError,        // corrupt or inconsistent input data
  kVersionMismatch,  // persisted database written by another format version
};

/// Single exception type thrown by the library. The code lets the CLI map
/// failures onto exit statuses and the HTTP layer onto response codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sealkit
