#pragma once

#include <stdexcept>
#include <string>

namespace threshq {

enum class ErrorCode {
  InvalidArgument,  // malformed value handed to a constructor or operation
  Config,           // experiment configuration failed validation
  Limit,            // enumeration or size limit exceeded
  Domain,           // operation precondition not met for this family
  Inconsistent,     // data contradicts the model (e.g. samples off the atom lattice)
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace threshq
