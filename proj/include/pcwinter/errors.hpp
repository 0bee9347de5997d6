#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcwinter {

// Base for every error raised by the library. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad command-line usage (unknown method, missing argument).
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Misuse of a mutable state object (double insert, missing parent, ...).
class StateError : public Error {
 public:
  using Error::Error;
};

class PrecedenceError : public StateError {
 public:
  using StateError::StateError;
};

// Exhaustive enumeration requested above its cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Training was asked to fit zero examples; callers substitute U(empty).
class EmptyCoalitionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcwinter
