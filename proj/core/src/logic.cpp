#include "normkit/logic.hpp"

#include <algorithm>
#include <cctype>

namespace normkit {

Term Term::constant(std::string name) { return Term{Kind::constant, std::move(name), {}}; }

Term Term::variable(std::string name) { return Term{Kind::variable, std::move(name), {}}; }

Term Term::function(std::string name, std::vector<Term> args) {
  return Term{Kind::function, std::move(name), std::move(args)};
}

bool Term::is_ground() const noexcept {
  if (kind == Kind::variable) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.name <=> b.name; c != 0) return c;
  return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                b.args.end());
}

bool Predicate::is_ground() const noexcept {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

namespace {

void append_args(std::string& out, const std::vector<Term>& args) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += to_string(args[i]);
  }
  out += ')';
}

}  // namespace

std::string to_string(const Term& term) {
  std::string out = term.name;
  if (term.kind == Term::Kind::function) append_args(out, term.args);
  return out;
}

std::string to_string(const Predicate& predicate) {
  std::string out = predicate.functor;
  if (!predicate.args.empty()) append_args(out, predicate.args);
  return out;
}

std::string to_string(const Binding& binding) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, value] : binding) {
    if (!first) out += ", ";
    first = false;
    out += name + "=" + to_string(value);
  }
  out += '}';
  return out;
}

bool is_variable_name(std::string_view name) noexcept {
  if (name.empty()) return false;
  const auto c = static_cast<unsigned char>(name.front());
  return std::isupper(c) || c == '_';
}

Term as_term(const Predicate& predicate) {
  if (predicate.args.empty()) return Term::constant(predicate.functor);
  return Term::function(predicate.functor, predicate.args);
}

namespace {

// One-way matching: `fact` is ground.
bool match_term(const Term& pattern, const Term& fact, Binding& bindings) {
  switch (pattern.kind) {
    case Term::Kind::variable: {
      auto it = bindings.find(pattern.name);
      if (it == bindings.end()) {
        bindings.emplace(pattern.name, fact);
        return true;
      }
      if (it->second.is_ground()) return it->second == fact;
      return match_term(it->second, fact, bindings);
    }
    case Term::Kind::constant:
      return fact.kind == Term::Kind::constant && fact.name == pattern.name;
    case Term::Kind::function:
      if (fact.kind != Term::Kind::function || fact.name != pattern.name ||
          fact.args.size() != pattern.args.size()) {
        return false;
      }
      for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        if (!match_term(pattern.args[i], fact.args[i], bindings)) return false;
      }
      return true;
  }
  return false;
}

const Term& walk(const Term& term, const Binding& bindings) {
  const Term* current = &term;
  while (current->kind == Term::Kind::variable) {
    auto it = bindings.find(current->name);
    if (it == bindings.end()) break;
    current = &it->second;
  }
  return *current;
}

bool occurs(const std::string& var, const Term& term, const Binding& bindings) {
  const Term& t = walk(term, bindings);
  if (t.kind == Term::Kind::variable) return t.name == var;
  return std::any_of(t.args.begin(), t.args.end(),
                     [&](const Term& a) { return occurs(var, a, bindings); });
}

bool unify_terms(const Term& left, const Term& right, Binding& bindings) {
  const Term& l = walk(left, bindings);
  const Term& r = walk(right, bindings);
  if (l.kind == Term::Kind::variable && r.kind == Term::Kind::variable && l.name == r.name) {
    return true;
  }
  if (l.kind == Term::Kind::variable) {
    if (occurs(l.name, r, bindings)) return false;
    bindings.emplace(l.name, r);
    return true;
  }
  if (r.kind == Term::Kind::variable) {
    if (occurs(r.name, l, bindings)) return false;
    bindings.emplace(r.name, l);
    return true;
  }
  if (l.kind != r.kind || l.name != r.name || l.args.size() != r.args.size()) return false;
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    if (!unify_terms(l.args[i], r.args[i], bindings)) return false;
  }
  return true;
}

}  // namespace

std::optional<Binding> unify(const Predicate& pattern, const Predicate& fact, Binding bindings) {
  if (pattern.functor != fact.functor || pattern.args.size() != fact.args.size()) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (!match_term(pattern.args[i], fact.args[i], bindings)) return std::nullopt;
  }
  return bindings;
}

std::optional<Binding> unify_general(const Predicate& left, const Predicate& right,
                                     Binding bindings) {
  if (left.functor != right.functor || left.args.size() != right.args.size()) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < left.args.size(); ++i) {
    if (!unify_terms(left.args[i], right.args[i], bindings)) return std::nullopt;
  }
  return bindings;
}

Term substitute(const Term& term, const Binding& bindings) {
  const Term& t = walk(term, bindings);
  if (t.kind != Term::Kind::function) return t;
  Term out = Term::function(t.name, {});
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(substitute(a, bindings));
  return out;
}

Predicate substitute(const Predicate& predicate, const Binding& bindings) {
  Predicate out{predicate.functor, {}};
  out.args.reserve(predicate.args.size());
  for (const auto& a : predicate.args) out.args.push_back(substitute(a, bindings));
  return out;
}

void collect_variables(const Term& term, std::vector<std::string>& out) {
  if (term.kind == Term::Kind::variable) {
    if (std::find(out.begin(), out.end(), term.name) == out.end()) out.push_back(term.name);
    return;
  }
  for (const auto& a : term.args) collect_variables(a, out);
}

void collect_variables(const Predicate& predicate, std::vector<std::string>& out) {
  for (const auto& a : predicate.args) collect_variables(a, out);
}

void collect_constants(const Term& term, std::vector<std::string>& out) {
  if (term.kind == Term::Kind::constant) {
    out.push_back(term.name);
    return;
  }
  for (const auto& a : term.args) collect_constants(a, out);
}

}  // namespace normkit
