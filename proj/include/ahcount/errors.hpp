#pragma once

#include <stdexcept>
#include <string>

namespace ahc {

/// Argument outside the domain where an iterated logarithm or potential is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive integration could not meet its tolerance (step underflow, step budget).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double where)
      : std::runtime_error(what + " at t=" + std::to_string(where)), location_(where) {}

  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// An explicit boundary spectrum ran out of levels before the requested bound.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal cross-check failed, e.g. a zero count that increases with the mode parameter.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed configuration or command-line input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ahc
