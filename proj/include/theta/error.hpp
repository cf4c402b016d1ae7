#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace theta {

enum class ErrorCode {
  IdsUnavailable,
  WrongKind,
  SeedMismatch,
  EmptyInput,
  ResourceLimit,
  UnsupportedQ,
  DomainError,
  ParseError,
  InvariantError,
  IoError,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace theta
