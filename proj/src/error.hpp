#pragma once

#include <stdexcept>
#include <string>

namespace infsel {

// Error categories; mirrored one-to-one by the C API status codes.
enum class Errc {
  invalid_argument = 1,
  config = 2,
  unsupported = 3,
  infeasible = 4,
  no_limit = 5,
  runtime = 6,
  io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace infsel
