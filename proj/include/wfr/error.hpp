#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace wfr {

enum class ErrorKind {
  invalid_argument,
  degenerate_ensemble,
  unsupported_model,
  step_size,
  no_jump_target,
  numerical_failure,
  domain_error,
  config_error,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Config validation failures additionally name the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorKind::config_error, field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace wfr
