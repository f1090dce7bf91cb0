#pragma once

#include <stdexcept>
#include <string>

namespace pat {

/// Invalid argument or shape mismatch at an API boundary.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid parameter set (attenuation law, solver configuration, phantom).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Overflow, NaN or divergence inside a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (array container, manifest).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line = 0)
      : std::runtime_error(what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pat
