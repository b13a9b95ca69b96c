#include "normkit/sexpr.hpp"

#include <cctype>

namespace normkit::sexpr {

bool Value::is_form(std::string_view h) const noexcept { return is_list() && head() == h; }

std::string_view Value::head() const noexcept {
  if (!is_list() || items.empty() || !items.front().is_atom()) return {};
  return items.front().text;
}

Value Value::atom(std::string text) { return Value{Kind::atom, std::move(text), {}, {}}; }
Value Value::string(std::string text) { return Value{Kind::string, std::move(text), {}, {}}; }
Value Value::list(std::vector<Value> items) { return Value{Kind::list, {}, std::move(items), {}}; }

namespace {

class Reader {
 public:
  Reader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  std::vector<Value> all() {
    std::vector<Value> out;
    skip_space();
    while (!done()) {
      out.push_back(value(0));
      skip_space();
    }
    return out;
  }

 private:
  static constexpr std::size_t kMaxDepth = 256;

  bool done() const { return at_ >= text_.size(); }
  char current() const { return text_[at_]; }
  SourcePosition here() const { return {line_, column_}; }

  void advance() {
    if (current() == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++at_;
  }

  [[noreturn]] void fail(SourcePosition pos, const std::string& message) const {
    throw ParseError(std::string(source_), pos, message);
  }

  void skip_space() {
    while (!done()) {
      const char c = current();
      if (c == ';') {
        while (!done() && current() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  static bool delimiter(char c) {
    return c == '(' || c == ')' || c == '"' || c == ';' || c == ' ' || c == '\t' || c == '\n' ||
           c == '\r';
  }

  Value value(std::size_t depth) {
    if (depth > kMaxDepth) fail(here(), "nesting too deep");
    const SourcePosition pos = here();
    const char c = current();
    if (c == '(') {
      advance();
      Value list;
      list.kind = Value::Kind::list;
      list.pos = pos;
      skip_space();
      while (true) {
        if (done()) fail(pos, "unterminated list");
        if (current() == ')') {
          advance();
          return list;
        }
        list.items.push_back(value(depth + 1));
        skip_space();
      }
    }
    if (c == ')') fail(pos, "unexpected ')'");
    if (c == '"') return quoted(pos);

    Value atom;
    atom.kind = Value::Kind::atom;
    atom.pos = pos;
    while (!done() && !delimiter(current())) {
      const auto u = static_cast<unsigned char>(current());
      if (u < 0x20 || u == 0x7f) fail(here(), "control character in atom");
      atom.text += current();
      advance();
    }
    return atom;
  }

  Value quoted(SourcePosition pos) {
    advance();
    Value s;
    s.kind = Value::Kind::string;
    s.pos = pos;
    while (true) {
      if (done()) fail(pos, "unterminated string");
      const char c = current();
      if (c == '"') {
        advance();
        return s;
      }
      if (c == '\\') {
        advance();
        if (done()) fail(pos, "unterminated string");
        const char e = current();
        switch (e) {
          case 'n': s.text += '\n'; break;
          case 't': s.text += '\t'; break;
          case '\\': s.text += '\\'; break;
          case '"': s.text += '"'; break;
          default: fail(here(), std::string("unknown escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      s.text += c;
      advance();
    }
  }

  std::string_view text_;
  std::string_view source_;
  std::size_t at_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::vector<Value> read_all(std::string_view text, std::string_view source_name) {
  return Reader(text, source_name).all();
}

std::string write(const Value& value) {
  switch (value.kind) {
    case Value::Kind::atom:
      return value.text;
    case Value::Kind::string: {
      std::string out = "\"";
      for (char c : value.text) {
        switch (c) {
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          case '\\': out += "\\\\"; break;
          case '"': out += "\\\""; break;
          default: out += c;
        }
      }
      return out + "\"";
    }
    case Value::Kind::list: {
      std::string out = "(";
      for (std::size_t i = 0; i < value.items.size(); ++i) {
        if (i) out += ' ';
        out += write(value.items[i]);
      }
      return out + ")";
    }
  }
  return {};
}

}  // namespace normkit::sexpr
