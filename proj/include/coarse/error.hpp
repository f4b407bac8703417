#pragma once

#include <stdexcept>
#include <string>

namespace coarse {

// Error taxonomy. Configuration and resource errors map to CLI exit code 2;
// verdict failures are values, never exceptions.
enum class ErrorKind { config, domain, resource, invariant };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, "configuration error: " + what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::domain, "domain error: " + what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what)
      : Error(ErrorKind::resource, "resource error: " + what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::invariant, "invariant violation: " + what) {}
};

}  // namespace coarse
