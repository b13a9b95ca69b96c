#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace normkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value fell outside the domain an operation accepts (e.g. alpha > beta).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dempster combination of fully contradictory evidence.
class TotalConflictError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid model: unresolved references, cycles, arity clashes,
/// duplicate names. Raised by builders that have no source position.
class ModelError : public Error {
 public:
  using Error::Error;
};

struct SourcePosition {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// A diagnostic tied to a location in a text input. what() renders as
/// `source:line:column: message`.
class ParseError : public Error {
 public:
  ParseError(std::string source, SourcePosition pos, std::string message);

  const std::string& source() const noexcept { return source_; }
  SourcePosition position() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string source_;
  SourcePosition pos_;
  std::string message_;
};

/// File-system failures (missing directory, unreadable file).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace normkit
