#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace selfaffine {

enum class ErrorCode {
  invalid_input,
  domain,
  index,
  contraction,
  resource,
  degenerate,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when an enumeration would exceed the leaf budget. Carries the
// largest depth that fits.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& message, unsigned max_feasible_depth)
      : Error(ErrorCode::resource, message),
        max_feasible_depth_(max_feasible_depth) {}

  unsigned max_feasible_depth() const noexcept { return max_feasible_depth_; }

 private:
  unsigned max_feasible_depth_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace selfaffine
