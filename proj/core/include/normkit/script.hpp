#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normkit/belief.hpp"
#include "normkit/logic.hpp"
#include "normkit/sexpr.hpp"

namespace normkit {

enum class StepStatus { pending, resolved, executed };

std::string_view to_string(StepStatus s) noexcept;

/// Extra facts attached to a step by resolution or repair, e.g. the chosen
/// grasp with its belief, or orientHandleToward(human).
struct StepNote {
  Predicate predicate;
  std::optional<BeliefInterval> belief;

  friend bool operator==(const StepNote&, const StepNote&) = default;
};

/// One node of a hierarchical action script. Steps with substeps are
/// compound; leaves are the primitive actions that execute.
struct ActionStep {
  std::string name;
  std::vector<Term> params;
  std::optional<Predicate> affordance;  // what a find step searches for
  std::vector<StepNote> notes;
  StepStatus status = StepStatus::pending;
  std::vector<ActionStep> substeps;

  bool is_leaf() const noexcept { return substeps.empty(); }
  const StepNote* find_note(std::string_view functor) const;

  friend bool operator==(const ActionStep&, const ActionStep&) = default;
};

/// `find(cutWith(self,O))`, `approach(self,human)`.
std::string to_string(const ActionStep& step);

struct ActionScript {
  std::vector<ActionStep> steps;

  bool empty() const noexcept { return steps.empty(); }

  friend bool operator==(const ActionScript&, const ActionScript&) = default;
};

/// Leaves in execution order.
std::vector<const ActionStep*> leaves(const ActionScript& script);
std::vector<ActionStep*> leaves(ActionScript& script);

/// Applies a binding to every parameter, affordance and note.
ActionScript substitute(const ActionScript& script, const Binding& binding);

/// Every variable still mentioned by a parameter or note (not by find
/// affordances, which are patterns).
std::vector<std::string> unbound_variables(const ActionScript& script);

/// Ordering and shape rules every script must satisfy; throws ModelError.
///  - step names are lowercase identifiers; find has an affordance and no params
///  - executed leaves form a prefix of the leaf order
///  - find leaves precede every other leaf
///  - handover(a,b,o) comes after some pickup(o) and some approach(a,b)
void validate(const ActionScript& script);

/// Single-line canonical text; equal scripts render identically.
std::string canonical(const ActionScript& script);

/// File form:
///   (script
///     (step find (affordance cutWith self O))
///     (step bring O human
///       (step approach self human)
///       (step handover self human O)))
/// Function terms are written `(bladeOf knife)`. A step may also carry
/// `(note (graspByHandle self knife) 0.81 1)` and `(status executed)`.
ActionScript parse_script(const sexpr::Value& form, std::string_view source_name);
ActionScript parse_script(std::string_view text, std::string_view source_name = "<script>");
/// Indented multi-line rendering that parses back to an equal script.
std::string serialize_script(const ActionScript& script, int indent = 0);

/// S-expression codecs shared by the scenario reader.
Term parse_term(const sexpr::Value& v, std::string_view source_name);
Predicate parse_sexpr_predicate(const sexpr::Value& v, std::string_view source_name);
std::string write_term(const Term& t);
std::string write_predicate(const Predicate& p);

}  // namespace normkit
