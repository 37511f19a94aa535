#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace desctrack {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, boxes, sequences).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A text row could not be parsed. `line()` is 1-based.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace desctrack
