#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topicpages {

// Maps onto the CLI exit codes: usage = 1, data = 2, protocol = 3.
enum class ErrorKind { usage = 1, data = 2, protocol = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Malformed input document. Carries the byte offset where parsing stopped.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t byte_position)
      : DataError(what + " at byte " + std::to_string(byte_position)), position_(byte_position) {}
  std::size_t byte_position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Tabular / line-oriented file problems. Line numbers are 1-based.
class FormatError : public DataError {
 public:
  FormatError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(ErrorKind::protocol, what) {}
};

}  // namespace topicpages
