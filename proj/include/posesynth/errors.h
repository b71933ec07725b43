#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace posesynth {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// A bad configuration value. `field` is the dotted path of the offending key,
// e.g. "grid.step_x".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Malformed input file. Text formats report a 1-based line number, binary
// formats a byte offset; the unused one is zero.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::uint64_t byte_offset = 0)
      : Error(message), line_(line), byte_offset_(byte_offset) {}

  std::size_t line() const { return line_; }
  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t line_;
  std::uint64_t byte_offset_;
};

}  // namespace posesynth
