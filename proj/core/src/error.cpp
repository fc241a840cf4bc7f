#include "promptsel/error.hpp"

namespace promptsel {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::scheme_violation: return "scheme violation";
    case ErrorKind::retrieval: return "retrieval error";
    case ErrorKind::integrity: return "integrity error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::normalization: return "normalization error";
    case ErrorKind::render: return "render error";
    case ErrorKind::format: return "format error";
    case ErrorKind::transport: return "transport error";
    case ErrorKind::request: return "request error";
    case ErrorKind::alignment: return "alignment error";
    case ErrorKind::oracle: return "oracle error";
    case ErrorKind::config: return "config error";
  }
  return "error";
}

}  // namespace promptsel
