#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace normkit {

/// A first-order term: a constant, a variable, or a function application
/// such as bladeOf(knife). In text, variables start with an uppercase letter
/// or underscore and constants with a lowercase letter.
struct Term {
  enum class Kind { constant, variable, function };

  Kind kind = Kind::constant;
  std::string name;
  std::vector<Term> args;  // non-empty iff kind == function

  static Term constant(std::string name);
  static Term variable(std::string name);
  static Term function(std::string name, std::vector<Term> args);

  bool is_variable() const noexcept { return kind == Kind::variable; }
  bool is_ground() const noexcept;

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
};

struct Predicate {
  std::string functor;
  std::vector<Term> args;

  std::size_t arity() const noexcept { return args.size(); }
  bool is_ground() const noexcept;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Variable substitution; ordered so that iteration and printing are stable.
using Binding = std::map<std::string, Term>;

std::string to_string(const Term& term);
std::string to_string(const Predicate& predicate);
/// `{O=knife, X=self}`
std::string to_string(const Binding& binding);

/// True for names that denote variables in the text formats.
bool is_variable_name(std::string_view name) noexcept;

/// Wraps a predicate as a function term, e.g. for not(outcome(harm)).
Term as_term(const Predicate& predicate);

/// Matches a pattern against a ground predicate, extending `bindings`.
/// Returns nothing on mismatch; bindings passed in are respected.
std::optional<Binding> unify(const Predicate& pattern, const Predicate& fact,
                             Binding bindings = {});

/// Full two-sided unification with occurs check. When two variables meet,
/// the variable from `left` is bound to the term from `right`.
std::optional<Binding> unify_general(const Predicate& left, const Predicate& right,
                                     Binding bindings = {});

/// Applies a substitution, resolving chains of variable bindings.
Term substitute(const Term& term, const Binding& bindings);
Predicate substitute(const Predicate& predicate, const Binding& bindings);

/// Collects variable names in first-occurrence order.
void collect_variables(const Term& term, std::vector<std::string>& out);
void collect_variables(const Predicate& predicate, std::vector<std::string>& out);

/// Collects constant leaves (including those nested in function terms).
void collect_constants(const Term& term, std::vector<std::string>& out);

}  // namespace normkit
