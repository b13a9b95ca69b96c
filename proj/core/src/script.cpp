#include "normkit/script.hpp"

#include <algorithm>
#include <cctype>

#include "normkit/error.hpp"
#include "normkit/format.hpp"

namespace normkit {

std::string_view to_string(StepStatus s) noexcept {
  switch (s) {
    case StepStatus::pending: return "pending";
    case StepStatus::resolved: return "resolved";
    case StepStatus::executed: return "executed";
  }
  return "?";
}

const StepNote* ActionStep::find_note(std::string_view functor) const {
  for (const auto& n : notes) {
    if (n.predicate.functor == functor) return &n;
  }
  return nullptr;
}

std::string to_string(const ActionStep& step) {
  std::string out = step.name + "(";
  if (step.affordance) out += to_string(*step.affordance);
  for (std::size_t i = 0; i < step.params.size(); ++i) {
    if (i || step.affordance) out += ',';
    out += to_string(step.params[i]);
  }
  return out + ")";
}

namespace {

template <typename Script, typename Out>
void collect_leaves(Script& steps, Out& out) {
  for (auto& s : steps) {
    if (s.is_leaf()) {
      out.push_back(&s);
    } else {
      collect_leaves(s.substeps, out);
    }
  }
}

void substitute_step(ActionStep& s, const Binding& b) {
  for (auto& p : s.params) p = substitute(p, b);
  if (s.affordance) s.affordance = substitute(*s.affordance, b);
  for (auto& n : s.notes) n.predicate = substitute(n.predicate, b);
  for (auto& c : s.substeps) substitute_step(c, b);
}

void step_variables(const ActionStep& s, std::vector<std::string>& out) {
  for (const auto& p : s.params) collect_variables(p, out);
  for (const auto& n : s.notes) collect_variables(n.predicate, out);
  for (const auto& c : s.substeps) step_variables(c, out);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s.front())) && s.front() != '_') return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_lower_identifier(std::string_view s) {
  return is_identifier(s) && std::islower(static_cast<unsigned char>(s.front()));
}

void validate_step(const ActionStep& s) {
  if (!is_lower_identifier(s.name)) throw ModelError("bad step name '" + s.name + "'");
  if (s.name == "find") {
    if (!s.affordance) throw ModelError("find step needs an affordance");
    if (!s.params.empty()) throw ModelError("find step takes no parameters");
    if (!s.is_leaf()) throw ModelError("find step cannot have substeps");
  }
  for (const auto& c : s.substeps) validate_step(c);
}

bool mentions(const std::vector<Term>& params, std::size_t i, const Term& t) {
  return i < params.size() && params[i] == t;
}

}  // namespace

std::vector<const ActionStep*> leaves(const ActionScript& script) {
  std::vector<const ActionStep*> out;
  collect_leaves(script.steps, out);
  return out;
}

std::vector<ActionStep*> leaves(ActionScript& script) {
  std::vector<ActionStep*> out;
  collect_leaves(script.steps, out);
  return out;
}

ActionScript substitute(const ActionScript& script, const Binding& binding) {
  ActionScript out = script;
  for (auto& s : out.steps) substitute_step(s, binding);
  return out;
}

std::vector<std::string> unbound_variables(const ActionScript& script) {
  std::vector<std::string> vars;
  for (const auto& s : script.steps) step_variables(s, vars);
  std::vector<std::string> out;
  for (auto& v : vars) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  }
  return out;
}

void validate(const ActionScript& script) {
  for (const auto& s : script.steps) validate_step(s);
  const auto order = leaves(script);

  bool pending_seen = false;
  bool non_find_seen = false;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const ActionStep& s = *order[i];
    if (s.status == StepStatus::executed) {
      if (pending_seen) throw ModelError("executed step " + to_string(s) + " follows an unexecuted one");
    } else {
      pending_seen = true;
    }
    if (s.name == "find") {
      if (non_find_seen) throw ModelError("find step " + to_string(s) + " must come first");
    } else {
      non_find_seen = true;
    }
    if (s.name == "handover") {
      if (s.params.size() != 3) throw ModelError("handover takes (giver receiver object)");
      bool picked = false;
      bool approached = false;
      for (std::size_t j = 0; j < i; ++j) {
        const ActionStep& p = *order[j];
        picked = picked || (p.name == "pickup" && mentions(p.params, 0, s.params[2]));
        approached = approached || (p.name == "approach" && mentions(p.params, 0, s.params[0]) &&
                                    mentions(p.params, 1, s.params[1]));
      }
      if (!picked) throw ModelError(to_string(s) + " has no earlier pickup of its object");
      if (!approached) throw ModelError(to_string(s) + " has no earlier approach to its receiver");
    }
  }
}

// --- s-expression codec -----------------------------------------------------

std::string write_term(const Term& t) {
  if (t.kind != Term::Kind::function) return t.name;
  std::string out = "(" + t.name;
  for (const auto& a : t.args) out += " " + write_term(a);
  return out + ")";
}

std::string write_predicate(const Predicate& p) {
  std::string out = "(" + p.functor;
  for (const auto& a : p.args) out += " " + write_term(a);
  return out + ")";
}

namespace {

std::optional<StepStatus> parse_status(std::string_view text) {
  if (text == "pending") return StepStatus::pending;
  if (text == "resolved") return StepStatus::resolved;
  if (text == "executed") return StepStatus::executed;
  return std::nullopt;
}

[[noreturn]] void fail(std::string_view source, const sexpr::Value& at, const std::string& message) {
  throw ParseError(std::string(source), at.pos, message);
}

std::string step_text(const ActionStep& s, int indent, bool multiline) {
  std::string out = "(step " + s.name;
  if (s.affordance) out += " (affordance " + write_predicate(*s.affordance).substr(1);
  for (const auto& p : s.params) out += " " + write_term(p);
  for (const auto& n : s.notes) {
    out += " (note " + write_predicate(n.predicate);
    if (n.belief) out += " " + format_exact(n.belief->alpha()) + " " + format_exact(n.belief->beta());
    out += ")";
  }
  if (s.status != StepStatus::pending) out += " (status " + std::string(to_string(s.status)) + ")";
  for (const auto& c : s.substeps) {
    if (multiline) {
      out += "\n" + std::string(static_cast<std::size_t>(indent + 2), ' ');
    } else {
      out += " ";
    }
    out += step_text(c, indent + 2, multiline);
  }
  return out + ")";
}

ActionStep parse_step(const sexpr::Value& form, std::string_view source) {
  if (!form.is_form("step")) fail(source, form, "expected (step <name> ...)");
  if (form.items.size() < 2 || !form.items[1].is_atom() || !is_lower_identifier(form.items[1].text)) {
    fail(source, form, "step needs a lowercase name");
  }
  ActionStep s;
  s.name = form.items[1].text;
  bool saw_status = false;
  for (std::size_t i = 2; i < form.items.size(); ++i) {
    const sexpr::Value& item = form.items[i];
    const std::string_view head = item.head();
    if (head == "step") {
      s.substeps.push_back(parse_step(item, source));
    } else if (!s.substeps.empty()) {
      fail(source, item, "substeps must come last");
    } else if (head == "affordance") {
      if (s.affordance) fail(source, item, "duplicate affordance");
      sexpr::Value pred = item;
      pred.items.erase(pred.items.begin());
      if (pred.items.empty()) fail(source, item, "affordance needs a predicate");
      pred.pos = item.items[1].pos;
      s.affordance = parse_sexpr_predicate(pred, source);
    } else if (head == "note") {
      if (item.items.size() != 2 && item.items.size() != 4) {
        fail(source, item, "note reads (note (pred args...) [alpha beta])");
      }
      StepNote note{parse_sexpr_predicate(item.items[1], source), std::nullopt};
      if (item.items.size() == 4) {
        double a = 0;
        double b = 0;
        for (std::size_t j : {2u, 3u}) {
          if (!item.items[j].is_atom() || !parse_double(item.items[j].text, j == 2 ? a : b)) {
            fail(source, item.items[j], "expected a number");
          }
        }
        try {
          note.belief = BeliefInterval(a, b);
        } catch (const DomainError& e) {
          fail(source, item.items[2], std::string("interval error: ") + e.what());
        }
      }
      s.notes.push_back(std::move(note));
    } else if (head == "status") {
      if (saw_status) fail(source, item, "duplicate status");
      saw_status = true;
      std::optional<StepStatus> st;
      if (item.items.size() == 2 && item.items[1].is_atom()) st = parse_status(item.items[1].text);
      if (!st) fail(source, item, "status is pending, resolved or executed");
      s.status = *st;
    } else {
      if (!s.notes.empty() || saw_status) fail(source, item, "parameters must precede notes and status");
      s.params.push_back(parse_term(item, source));
    }
  }
  return s;
}

}  // namespace

Term parse_term(const sexpr::Value& v, std::string_view source) {
  if (v.is_string()) fail(source, v, "strings are not terms");
  if (v.is_atom()) {
    if (!is_identifier(v.text)) fail(source, v, "bad term '" + v.text + "'");
    return is_variable_name(v.text) ? Term::variable(v.text) : Term::constant(v.text);
  }
  if (v.items.size() < 2 || !v.items[0].is_atom() || !is_lower_identifier(v.items[0].text)) {
    fail(source, v, "function term reads (name arg...)");
  }
  std::vector<Term> args;
  for (std::size_t i = 1; i < v.items.size(); ++i) args.push_back(parse_term(v.items[i], source));
  return Term::function(v.items[0].text, std::move(args));
}

Predicate parse_sexpr_predicate(const sexpr::Value& v, std::string_view source) {
  if (!v.is_list()) fail(source, v, "expected (predicate arg...)");
  Term t = parse_term(v, source);
  return Predicate{std::move(t.name), std::move(t.args)};
}

std::string canonical(const ActionScript& script) {
  std::string out = "(script";
  for (const auto& s : script.steps) out += " " + step_text(s, 0, false);
  return out + ")";
}

std::string serialize_script(const ActionScript& script, int indent) {
  std::string out = "(script";
  for (const auto& s : script.steps) {
    out += "\n" + std::string(static_cast<std::size_t>(indent + 2), ' ') + step_text(s, indent + 2, true);
  }
  return out + ")";
}

ActionScript parse_script(const sexpr::Value& form, std::string_view source) {
  if (!form.is_form("script")) fail(source, form, "expected (script (step ...) ...)");
  ActionScript script;
  for (std::size_t i = 1; i < form.items.size(); ++i) script.steps.push_back(parse_step(form.items[i], source));
  return script;
}

ActionScript parse_script(std::string_view text, std::string_view source) {
  const auto forms = sexpr::read_all(text, source);
  if (forms.size() != 1) {
    throw ParseError(std::string(source), forms.empty() ? SourcePosition{1, 1} : forms[1].pos,
                     "expected exactly one (script ...) form");
  }
  return parse_script(forms.front(), source);
}

}  // namespace normkit
