#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace kpz {

enum class ErrorKind {
  argument,
  domain,
  numeric,
  resource,
  containment,
  configuration,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::resource: return "resource";
    case ErrorKind::containment: return "containment";
    case ErrorKind::configuration: return "configuration";
  }
  return "unknown";
}

/// Base of every error raised by the library. Carries a machine-readable
/// kind and a small set of named numeric diagnostics.
class Error : public std::runtime_error {
 public:
  using Details = std::map<std::string, double>;

  Error(ErrorKind kind, const std::string& what, Details details = {})
      : std::runtime_error(what), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const Details& details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  Details details_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what, Details d = {})
      : Error(ErrorKind::argument, what, std::move(d)) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, Details d = {})
      : Error(ErrorKind::domain, what, std::move(d)) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, Details d = {})
      : Error(ErrorKind::numeric, what, std::move(d)) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what, Details d = {})
      : Error(ErrorKind::resource, what, std::move(d)) {}
};

class ContainmentError : public Error {
 public:
  explicit ContainmentError(const std::string& what, Details d = {})
      : Error(ErrorKind::containment, what, std::move(d)) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what, Details d = {})
      : Error(ErrorKind::configuration, what, std::move(d)) {}
};

}  // namespace kpz
