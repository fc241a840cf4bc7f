#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace promptsel {

enum class ErrorKind {
  parse,             // malformed corpus / file line
  scheme_violation,  // label outside the declared scheme, bad token
  retrieval,         // embedding unavailable
  integrity,         // dimension mismatch, non-finite values, corrupt cache
  domain,            // invalid numeric input (empty entropy, zero vector)
  normalization,     // max <= 0 in normalize()
  render,            // token cannot be placed in a prompt
  format,            // tagged line unit without delimiter
  transport,         // network failure after retries
  request,           // endpoint rejected the request (4xx)
  alignment,         // prediction/gold mismatch
  oracle,            // mock client could not interpret the prompt
  config,            // bad configuration or CLI usage
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace promptsel
