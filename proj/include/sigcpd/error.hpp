#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sigcpd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite numbers, wrong level-0 scalar, out-of-span dates and similar.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Operands whose dimension or truncation depth do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Not enough observations for the requested operation.
class InsufficientData : public Error {
 public:
  InsufficientData(const std::string& what, std::size_t required, std::size_t available)
      : Error(what), required_(required), available_(available) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

/// Missing or inconsistent run configuration (for example no CPC source).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A parameter set that violates one or more documented ranges.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Input that makes a statistic undefined, e.g. zero burn-in variance.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV content; carries the 1-based line number.
class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sigcpd
