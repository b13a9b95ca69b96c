#include "normkit/error.hpp"

namespace normkit {

namespace {

std::string render(const std::string& source, SourcePosition pos, const std::string& message) {
  return source + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
         message;
}

}  // namespace

ParseError::ParseError(std::string source, SourcePosition pos, std::string message)
    : Error(render(source, pos, message)),
      source_(std::move(source)),
      pos_(pos),
      message_(std::move(message)) {}

}  // namespace normkit
