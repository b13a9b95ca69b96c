#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "normkit/error.hpp"

namespace normkit::sexpr {

/// A parsed s-expression node with its source position. Atoms keep their raw
/// text; quoted strings are unescaped and flagged.
struct Value {
  enum class Kind { atom, string, list };

  Kind kind = Kind::atom;
  std::string text;
  std::vector<Value> items;
  SourcePosition pos;

  bool is_atom() const noexcept { return kind == Kind::atom; }
  bool is_list() const noexcept { return kind == Kind::list; }
  bool is_string() const noexcept { return kind == Kind::string; }

  /// True for a list whose first item is the atom `head`.
  bool is_form(std::string_view head) const noexcept;
  /// Atom text of the first item of a list, or empty.
  std::string_view head() const noexcept;

  static Value atom(std::string text);
  static Value string(std::string text);
  static Value list(std::vector<Value> items);
};

/// Reads every top-level form. `;` starts a line comment.
std::vector<Value> read_all(std::string_view text, std::string_view source_name);

/// Single-line canonical rendering.
std::string write(const Value& value);

}  // namespace normkit::sexpr
