// Line-oriented parsers for the rule and scene formats.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "normkit/affordance.hpp"
#include "normkit/error.hpp"
#include "normkit/format.hpp"

namespace normkit {

namespace {

enum class Tok {
  ident,
  number,
  lparen,
  rparen,
  lbracket,
  rbracket,
  comma,
  colon,
  amp,
  arrow,
  at,
  at_ctx,
  end,
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::amp: return "'&'";
    case Tok::arrow: return "'=>'";
    case Tok::at: return "'@'";
    case Tok::at_ctx: return "'@ctx'";
    case Tok::end: return "end of line";
  }
  return "token";
}

struct Token {
  Tok kind;
  std::string text;
  SourcePosition pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Tokenizes one physical line; `#` ends the line.
class LineLexer {
 public:
  LineLexer(std::string_view line, std::size_t line_no, const std::string& source)
      : line_(line), line_no_(line_no), source_(source) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      const char c = line_[i];
      if (c == '#') break;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      const SourcePosition pos{line_no_, i + 1};
      auto single = [&](Tok t) {
        out.push_back({t, std::string(1, c), pos});
        ++i;
      };
      switch (c) {
        case '(': single(Tok::lparen); continue;
        case ')': single(Tok::rparen); continue;
        case '[': single(Tok::lbracket); continue;
        case ']': single(Tok::rbracket); continue;
        case ',': single(Tok::comma); continue;
        case ':': single(Tok::colon); continue;
        case '&': single(Tok::amp); continue;
        default: break;
      }
      if (c == '=' && i + 1 < line_.size() && line_[i + 1] == '>') {
        out.push_back({Tok::arrow, "=>", pos});
        i += 2;
        continue;
      }
      if (c == '@') {
        std::size_t j = i + 1;
        while (j < line_.size() && ident_char(line_[j])) ++j;
        const std::string_view word = line_.substr(i + 1, j - i - 1);
        if (word.empty()) {
          single(Tok::at);
        } else if (word == "ctx") {
          out.push_back({Tok::at_ctx, "@ctx", pos});
          i = j;
        } else {
          fail(pos, "unknown marker '@" + std::string(word) + "'");
        }
        continue;
      }
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < line_.size() && ident_char(line_[j])) ++j;
        out.push_back({Tok::ident, std::string(line_.substr(i, j - i)), pos});
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
        std::size_t j = i + 1;
        while (j < line_.size()) {
          const char d = line_[j];
          const bool exp_sign = (d == '-' || d == '+') && (line_[j - 1] == 'e' || line_[j - 1] == 'E');
          if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' ||
              exp_sign) {
            ++j;
          } else {
            break;
          }
        }
        out.push_back({Tok::number, std::string(line_.substr(i, j - i)), pos});
        i = j;
        continue;
      }
      if (static_cast<unsigned char>(c) >= 0x80) {
        fail(pos, "non-ASCII character outside a comment");
      }
      fail(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::end, "", SourcePosition{line_no_, line_.size() + 1}});
    return out;
  }

 private:
  [[noreturn]] void fail(SourcePosition pos, const std::string& message) const {
    throw ParseError(source_, pos, message);
  }

  std::string_view line_;
  std::size_t line_no_;
  const std::string& source_;
};

// Recursive-descent parser over the tokens of one line.
class LineParser {
 public:
  LineParser(std::vector<Token> tokens, const std::string& source)
      : tokens_(std::move(tokens)), source_(source) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t at = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[at];
  }
  bool at(Tok t) const { return peek().kind == t; }

  const Token& expect(Tok t) {
    if (!at(t)) {
      const Token& got = peek();
      fail(got.pos, std::string("expected ") + describe(t) + ", found " +
                        (got.kind == Tok::end ? describe(Tok::end) : "'" + got.text + "'"));
    }
    return tokens_[pos_++];
  }

  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }

  Term term() {
    const Token& name = expect(Tok::ident);
    if (at(Tok::lparen)) {
      if (is_variable_name(name.text)) {
        fail(name.pos, "function symbol '" + name.text + "' must start with a lowercase letter");
      }
      auto args = arguments();
      function_arity(name, args.size());
      return Term::function(name.text, std::move(args));
    }
    return is_variable_name(name.text) ? Term::variable(name.text) : Term::constant(name.text);
  }

  std::vector<Term> arguments() {
    expect(Tok::lparen);
    std::vector<Term> args;
    if (at(Tok::rparen)) fail(peek().pos, "empty argument list");
    args.push_back(term());
    while (accept(Tok::comma)) args.push_back(term());
    expect(Tok::rparen);
    return args;
  }

  std::pair<Predicate, SourcePosition> predicate() {
    const Token& name = expect(Tok::ident);
    if (is_variable_name(name.text)) {
      fail(name.pos, "predicate '" + name.text + "' must start with a lowercase letter");
    }
    Predicate p{name.text, {}};
    if (at(Tok::lparen)) p.args = arguments();
    return {std::move(p), name.pos};
  }

  BeliefInterval interval() {
    const Token& open = expect(Tok::lbracket);
    const double lo = number();
    expect(Tok::comma);
    const double hi = number();
    expect(Tok::rbracket);
    try {
      return BeliefInterval(lo, hi);
    } catch (const DomainError& e) {
      fail(open.pos, std::string("interval error: ") + e.what());
    }
  }

  double number() {
    const Token& t = expect(Tok::number);
    double v = 0.0;
    if (!parse_double(t.text, v)) fail(t.pos, "malformed number '" + t.text + "'");
    return v;
  }

  [[noreturn]] void fail(SourcePosition pos, const std::string& message) const {
    throw ParseError(source_, pos, message);
  }

  // Arity bookkeeping shared across all lines of one file.
  std::map<std::string, std::pair<std::size_t, SourcePosition>>* predicate_arity = nullptr;
  std::map<std::string, std::pair<std::size_t, SourcePosition>>* function_arities = nullptr;

  void check_predicate_arity(const Predicate& p, SourcePosition pos) {
    if (!predicate_arity) return;
    auto [it, fresh] = predicate_arity->try_emplace(p.functor, p.arity(), pos);
    if (!fresh && it->second.first != p.arity()) {
      fail(pos, "arity clash: '" + p.functor + "' used with " + std::to_string(p.arity()) +
                    " arguments, earlier with " + std::to_string(it->second.first) + " at line " +
                    std::to_string(it->second.second.line));
    }
  }

 private:
  void function_arity(const Token& name, std::size_t arity) {
    if (!function_arities) return;
    auto [it, fresh] = function_arities->try_emplace(name.text, arity, name.pos);
    if (!fresh && it->second.first != arity) {
      fail(name.pos, "arity clash: function '" + name.text + "' used with " +
                         std::to_string(arity) + " arguments, earlier with " +
                         std::to_string(it->second.first));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const std::string& source_;
};

template <typename PerLine>
void for_each_line(std::string_view text, PerLine&& per_line) {
  std::size_t line_no = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    per_line(text.substr(start, end - start), line_no);
    if (end == text.size()) break;
    start = end + 1;
    ++line_no;
  }
}

void check_ground(const Predicate& p, SourcePosition pos, const std::string& source) {
  if (!p.is_ground()) {
    throw ParseError(source, pos, "fact '" + to_string(p) + "' contains variables");
  }
}

}  // namespace

std::vector<AffordanceRule> parse_rule_file(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  std::vector<AffordanceRule> rules;
  std::map<std::string, std::size_t> seen_ids;
  std::map<std::string, std::pair<std::size_t, SourcePosition>> predicate_arity;
  std::map<std::string, std::pair<std::size_t, SourcePosition>> function_arity;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    LineParser p(LineLexer(line, line_no, source).run(), source);
    if (p.at(Tok::end)) return;
    p.predicate_arity = &predicate_arity;
    p.function_arities = &function_arity;

    AffordanceRule rule;
    const Token& id = p.expect(Tok::ident);
    rule.id = id.text;
    if (auto [it, fresh] = seen_ids.try_emplace(rule.id, line_no); !fresh) {
      p.fail(id.pos, "duplicate rule id '" + rule.id + "' (first defined on line " +
                         std::to_string(it->second) + ")");
    }
    rule.interval = p.interval();
    p.expect(Tok::colon);

    do {
      Conjunct c;
      if (p.accept(Tok::at_ctx)) c.source = FactSource::context;
      auto [pred, pos] = p.predicate();
      p.check_predicate_arity(pred, pos);
      c.predicate = std::move(pred);
      rule.conjuncts.push_back(std::move(c));
    } while (p.accept(Tok::amp));

    p.expect(Tok::arrow);
    auto [consequent, cons_pos] = p.predicate();
    p.check_predicate_arity(consequent, cons_pos);
    p.expect(Tok::end);

    std::vector<std::string> bound;
    for (const auto& c : rule.conjuncts) collect_variables(c.predicate, bound);
    std::vector<std::string> needed;
    collect_variables(consequent, needed);
    for (const auto& v : needed) {
      if (std::find(bound.begin(), bound.end(), v) == bound.end()) {
        p.fail(cons_pos, "range restriction: variable '" + v +
                             "' in the consequent does not occur in any conjunct");
      }
    }
    rule.consequent = std::move(consequent);
    rules.push_back(std::move(rule));
  });
  return rules;
}

Predicate parse_predicate(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  if (text.find('\n') != std::string_view::npos) {
    throw ParseError(source, {1, text.find('\n') + 1}, "predicate must fit on one line");
  }
  LineParser p(LineLexer(text, 1, source).run(), source);
  auto [pred, pos] = p.predicate();
  p.expect(Tok::end);
  return pred;
}

Scene parse_scene_file(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  Scene scene;
  bool has_roster = false;
  std::set<std::string> roster;
  std::map<std::string, std::size_t> seen_facts;
  std::vector<std::pair<Fact, SourcePosition>> parsed;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    LineParser p(LineLexer(line, line_no, source).run(), source);
    if (p.at(Tok::end)) return;

    if (p.peek().kind == Tok::ident && p.peek().text == "objects" && p.peek(1).kind == Tok::colon) {
      const SourcePosition pos = p.peek().pos;
      if (has_roster) p.fail(pos, "duplicate 'objects:' header");
      has_roster = true;
      p.expect(Tok::ident);
      p.expect(Tok::colon);
      if (!p.at(Tok::end)) {
        do {
          const Token& obj = p.expect(Tok::ident);
          if (is_variable_name(obj.text)) {
            p.fail(obj.pos, "object '" + obj.text + "' must start with a lowercase letter");
          }
          if (!roster.insert(obj.text).second) {
            p.fail(obj.pos, "object '" + obj.text + "' listed twice");
          }
          scene.objects.push_back(obj.text);
        } while (p.accept(Tok::comma));
      }
      p.expect(Tok::end);
      return;
    }

    Fact fact;
    if (p.accept(Tok::at_ctx)) fact.source = FactSource::context;
    auto [pred, pos] = p.predicate();
    check_ground(pred, pos, source);
    if (p.accept(Tok::at)) fact.belief = p.interval();
    p.expect(Tok::end);
    fact.predicate = std::move(pred);

    const std::string key = to_string(fact.predicate);
    if (auto [it, fresh] = seen_facts.try_emplace(key, line_no); !fresh) {
      p.fail(pos, "duplicate fact '" + key + "' (first on line " + std::to_string(it->second) + ")");
    }
    parsed.emplace_back(std::move(fact), pos);
  });

  for (auto& [fact, pos] : parsed) {
    if (fact.source == FactSource::percept) {
      std::vector<std::string> constants;
      for (const auto& a : fact.predicate.args) collect_constants(a, constants);
      for (const auto& c : constants) {
        if (c == "self") continue;
        if (has_roster) {
          if (!roster.count(c)) {
            throw ParseError(source, pos,
                             "object '" + c + "' is not listed in the 'objects:' header");
          }
        } else if (roster.insert(c).second) {
          scene.objects.push_back(c);
        }
      }
    }
    scene.facts.push_back(std::move(fact));
  }
  return scene;
}

namespace {

std::string interval_text(const BeliefInterval& iv) {
  return "[" + format_exact(iv.alpha()) + "," + format_exact(iv.beta()) + "]";
}

}  // namespace

std::string to_string(const AffordanceRule& rule) {
  std::string out = rule.id + " " + interval_text(rule.interval) + ": ";
  for (std::size_t i = 0; i < rule.conjuncts.size(); ++i) {
    if (i) out += " & ";
    if (rule.conjuncts[i].source == FactSource::context) out += "@ctx ";
    out += to_string(rule.conjuncts[i].predicate);
  }
  out += " => " + to_string(rule.consequent);
  return out;
}

std::string serialize_rules(std::span<const AffordanceRule> rules) {
  std::string out;
  for (const auto& r : rules) out += to_string(r) + "\n";
  return out;
}

std::string to_string(const Fact& fact) {
  std::string out = fact.source == FactSource::context ? "@ctx " : "";
  out += to_string(fact.predicate) + " @ " + interval_text(fact.belief);
  return out;
}

std::string serialize_scene(const Scene& scene) {
  std::string out = "objects:";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    out += i ? ", " : " ";
    out += scene.objects[i];
  }
  out += "\n";
  for (const auto& f : scene.facts) out += to_string(f) + "\n";
  return out;
}

void validate_scene(const Scene& scene) {
  std::set<std::string> roster(scene.objects.begin(), scene.objects.end());
  for (const auto& f : scene.facts) {
    if (!f.predicate.is_ground()) {
      throw ModelError("fact '" + to_string(f.predicate) + "' contains variables");
    }
    if (f.source != FactSource::percept) continue;
    std::vector<std::string> constants;
    for (const auto& a : f.predicate.args) collect_constants(a, constants);
    for (const auto& c : constants) {
      if (c != "self" && !roster.count(c)) {
        throw ModelError("object '" + c + "' in fact '" + to_string(f.predicate) +
                         "' is not in the scene roster");
      }
    }
  }
}

}  // namespace normkit
