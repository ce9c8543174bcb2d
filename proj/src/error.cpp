#include "selfaffine/error.hpp"

namespace selfaffine {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::domain: return "domain";
    case ErrorCode::index: return "index";
    case ErrorCode::contraction: return "contraction";
    case ErrorCode::resource: return "resource";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace selfaffine
