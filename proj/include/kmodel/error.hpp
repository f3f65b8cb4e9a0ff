#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmodel {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Timestamps or sequence ids that go backwards.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid knowledge tree.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Unknown person, knowledge point, branch or file.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Mathematically undefined request (zero mean, zero deviation, t < 0 ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure reading or writing the history store.
class StoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace kmodel
