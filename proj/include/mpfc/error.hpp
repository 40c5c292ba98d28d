#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mpfc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A field holds non-finite samples or does not match the grid it claims.
class InvalidField : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. nonzero mean handed to a
// zero-mean subsystem).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Invalid user-facing configuration. Carries the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace mpfc
