#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

enum class ErrorCode {
  domain = 1,     // an input violates a documented precondition
  numerical = 2,  // an iteration failed to converge or a result is unphysical
  config = 3,     // malformed or incomplete configuration
  io = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace optomech
