#include "normkit/goal_manager.hpp"

#include <algorithm>
#include <set>

#include "normkit/format.hpp"

namespace normkit {

Goal::Goal(Predicate p) : predicate(std::move(p)) {
  if (!predicate.is_ground()) throw DomainError("goal " + to_string(predicate) + " is not ground");
}

namespace {

const Term kSelf = Term::constant("self");

ActionStep step(std::string name, std::vector<Term> params, std::vector<ActionStep> substeps = {}) {
  ActionStep s;
  s.name = std::move(name);
  s.params = std::move(params);
  s.substeps = std::move(substeps);
  return s;
}

ActionStep bring(const Term& object, const Term& receiver) {
  return step("bring", {object, receiver},
              {step("approach", {kSelf, receiver}), step("handover", {kSelf, receiver, object})});
}

struct Template {
  const char* pattern;
  ActionScript (*expand)(const Binding&);
};

const std::vector<Template>& templates() {
  static const std::vector<Template> table = {
      {"possess(R,cutwith(T))",
       [](const Binding& b) {
         const Term object = Term::variable("O");
         ActionStep find;
         find.name = "find";
         find.affordance = Predicate{"cutWith", {kSelf, object}};
         return ActionScript{{find, step("pickup", {object}), bring(object, b.at("R"))}};
       }},
      {"deliver(R,O)",
       [](const Binding& b) {
         return ActionScript{{step("pickup", {b.at("O")}), bring(b.at("O"), b.at("R"))}};
       }},
  };
  return table;
}

std::string interval_text(const BeliefInterval& iv) { return to_string(iv); }

}  // namespace

std::vector<std::string> known_goal_templates() {
  std::vector<std::string> out;
  for (const auto& t : templates()) out.emplace_back(t.pattern);
  return out;
}

ActionScript decompose(const Goal& goal) {
  for (const auto& t : templates()) {
    if (auto b = unify(parse_predicate(t.pattern), goal.predicate)) return t.expand(*b);
  }
  std::string known;
  for (const auto& name : known_goal_templates()) known += (known.empty() ? "" : ", ") + name;
  throw UnknownGoalError("no decomposition for goal " + to_string(goal.predicate) + "; known: " + known);
}

FindResult resolve_find(const ActionStep& find, const Scene& scene, std::span<const AffordanceRule> rules,
                        std::span<const Fact> context, double min_alpha) {
  if (!find.affordance) throw ResolutionError("step " + to_string(find) + " has no affordance to search for");
  const Predicate& goal = *find.affordance;

  FindResult out;
  out.requirements = abduce(rules, goal);
  std::set<std::string> relevant;
  for (const auto& r : out.requirements) relevant.insert(r.rule_id);
  std::vector<AffordanceRule> subset;
  for (const auto& r : rules) {
    if (relevant.count(r.id)) subset.push_back(r);
  }

  for (auto& b : infer(subset, scene, context).beliefs) {
    if (unify(goal, b.affordance)) out.candidates.push_back(std::move(b));
  }
  auto best = select_best(out.candidates, min_alpha);
  if (!best) {
    throw ResolutionError("nothing in the scene affords " + to_string(goal) + " with alpha >= " +
                          format_trimmed4(min_alpha));
  }
  out.binding = *unify(goal, best->affordance);
  out.chosen = *best;
  out.step = find;
  out.step.affordance = best->affordance;
  out.step.notes.push_back(StepNote{best->affordance, best->belief});
  out.step.status = StepStatus::resolved;
  return out;
}

PickupResult resolve_pickup(const ActionStep& pickup, const Scene& scene, std::span<const AffordanceRule> rules,
                            std::span<const Fact> context, const std::optional<Term>& receiver,
                            double min_alpha) {
  if (pickup.params.empty() || !pickup.params[0].is_ground()) {
    throw ResolutionError("step " + to_string(pickup) + " has no bound object");
  }
  const Term& object = pickup.params[0];

  PickupResult out;
  for (auto& b : infer(rules, scene, context).beliefs) {
    const auto& a = b.affordance;
    if (a.functor.rfind("grasp", 0) == 0 && a.arity() == 2 && a.args[0] == kSelf && a.args[1] == object) {
      out.candidates.push_back(std::move(b));
    }
  }
  auto best = select_best(out.candidates, min_alpha);
  if (!best) {
    throw ResolutionError("no grasp affordance for " + to_string(object) + " with alpha >= " +
                          format_trimmed4(min_alpha));
  }
  out.chosen = *best;
  out.step = pickup;
  out.step.notes.push_back(StepNote{best->affordance, best->belief});
  if (best->affordance.functor == "graspByBlade" && receiver) {
    out.step.notes.push_back(StepNote{Predicate{"orientHandleToward", {*receiver}}, std::nullopt});
  }
  out.step.status = StepStatus::resolved;
  return out;
}

// --- tracing helpers --------------------------------------------------------

namespace {

void trace_ranking(Trace& trace, const std::string& phase, const std::vector<RankedPrecedent>& ranking) {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    TraceRecord r("retrieval");
    r.value("rank", std::to_string(i + 1))
        .value("case", ranking[i].name)
        .value("score", format_fixed4(ranking[i].score))
        .value("label", std::string(to_string(ranking[i].acceptability)))
        .field("phase", phase);
    trace.push_back(std::move(r));
  }
}

std::string notes_text(const ActionStep& s) {
  std::string out;
  for (const auto& n : s.notes) {
    if (!out.empty()) out += "; ";
    out += to_string(n.predicate);
    if (n.belief) out += " " + interval_text(*n.belief);
  }
  return out;
}

// Splices a checked prefix back in front of the untouched remainder.
ActionScript splice(const ActionScript& checked_prefix, const ActionScript& full, std::size_t prefix_len) {
  ActionScript out = checked_prefix;
  out.steps.insert(out.steps.end(), full.steps.begin() + static_cast<std::ptrdiff_t>(prefix_len),
                   full.steps.end());
  return out;
}

}  // namespace

void append_check_trace(Trace& trace, const std::string& phase, const CheckResult& check,
                        const CheckConfig& config) {
  trace_ranking(trace, phase, check.initial_ranking);
  const RankedPrecedent* first = decisive_precedent(check.initial_ranking, config);
  TraceRecord decision("decisive precedent");
  if (first) {
    decision.value("case", first->name).value("label", std::string(to_string(first->acceptability)));
  } else {
    decision.value("case", "none").field("floor", format_fixed4(config.min_similarity));
  }
  decision.field("phase", phase);
  trace.push_back(std::move(decision));

  for (const auto& m : check.modifications) {
    TraceRecord r("modification");
    r.value("operator", std::string(to_string(m.op))).field("site", m.site).field("edit", m.detail);
    trace.push_back(std::move(r));
  }
  if (check.modifications.empty()) return;
  trace_ranking(trace, phase + "-repaired", check.final_ranking);
  if (const RankedPrecedent* top = decisive_precedent(check.final_ranking, config)) {
    TraceRecord r("top precedent after repair");
    r.value("case", top->name)
        .value("score", format_fixed4(top->score))
        .value("label", std::string(to_string(top->acceptability)));
    trace.push_back(std::move(r));
    for (const auto& ci : top->candidate_inferences) {
      TraceRecord c("candidate inference");
      c.value("expression", to_string(ci)).field("from", top->name);
      trace.push_back(std::move(c));
    }
  }
}

ExecutionResult execute(const Scenario& s, const CaseLibrary& library, const CheckConfig& config) {
  ExecutionResult out{s, {}};
  ActionScript script = s.script();
  std::size_t executed = 0;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    ActionScript prefix;
    prefix.steps.assign(script.steps.begin(), script.steps.begin() + static_cast<std::ptrdiff_t>(i + 1));
    Scenario view = s;
    view.set_script(prefix);

    TraceRecord head("check");
    head.value("step", std::to_string(i + 1)).value("action", to_string(script.steps[i]));
    out.trace.push_back(std::move(head));
    CheckResult check = check_moral_percept(view, library, config);
    append_check_trace(out.trace, "step-" + std::to_string(i + 1), check, config);

    const std::size_t grown = check.scenario.script().steps.size();
    script = splice(check.scenario.script(), script, i + 1);
    i = grown - 1;

    ActionScript done;
    done.steps.assign(script.steps.begin(), script.steps.begin() + static_cast<std::ptrdiff_t>(i + 1));
    for (ActionStep* leaf : leaves(done)) {
      if (leaf->status == StepStatus::executed) continue;
      leaf->status = StepStatus::executed;
      TraceRecord r("execute");
      r.value("n", std::to_string(++executed)).value("action", to_string(*leaf));
      if (!leaf->notes.empty()) r.field("notes", notes_text(*leaf));
      out.trace.push_back(std::move(r));
    }
    std::copy(done.steps.begin(), done.steps.end(), script.steps.begin());
  }
  out.scenario.set_script(std::move(script));
  return out;
}

EpisodeResult run_episode(const Scenario& s, const CaseLibrary& library, const CheckConfig& config) {
  if (!s.goal()) throw ModelError("scenario '" + s.name() + "' has no goal");
  static const std::vector<AffordanceRule> no_rules;
  const std::span<const AffordanceRule> rules =
      s.rules() ? std::span<const AffordanceRule>(*s.rules()) : std::span<const AffordanceRule>(no_rules);

  EpisodeResult out{s, {}};
  Trace& trace = out.trace;
  trace.push_back(TraceRecord("goal").value("goal", to_string(*s.goal())));

  ActionScript script = decompose(Goal(*s.goal()));
  trace.push_back(TraceRecord("script").value("script", canonical(script)));

  for (ActionStep* leaf : leaves(script)) {
    if (leaf->name != "find") continue;
    FindResult found = resolve_find(*leaf, s.scene(), rules, {}, s.min_alpha());
    for (const auto& req : found.requirements) {
      std::string percepts;
      std::string context;
      for (const auto& p : req.percepts) percepts += (percepts.empty() ? "" : " & ") + to_string(p);
      for (const auto& p : req.context) context += (context.empty() ? "" : " & ") + to_string(p);
      TraceRecord r("search requirement");
      r.value("rule", req.rule_id).field("percepts", percepts).field("context", context);
      trace.push_back(std::move(r));
    }
    for (const auto& c : found.candidates) {
      std::string from;
      for (const auto& g : c.derivation) from += (from.empty() ? "" : ",") + g.rule_id;
      TraceRecord r("infer");
      r.value("affordance", to_string(c.affordance)).value("belief", interval_text(c.belief)).field("rules", from);
      trace.push_back(std::move(r));
    }
    TraceRecord r("find");
    r.value("affordance", to_string(found.chosen.affordance))
        .value("belief", interval_text(found.chosen.belief))
        .field("binding", to_string(found.binding));
    trace.push_back(std::move(r));
    *leaf = found.step;
    script = substitute(script, found.binding);
    break;
  }

  for (ActionStep* leaf : leaves(script)) {
    if (leaf->name != "pickup") continue;
    std::optional<Term> receiver;
    for (const ActionStep* other : leaves(script)) {
      if (other->name == "handover" && other->params.size() == 3 && other->params[2] == leaf->params.at(0)) {
        receiver = other->params[1];
      }
    }
    PickupResult picked = resolve_pickup(*leaf, s.scene(), rules, {}, receiver, s.min_alpha());
    for (const auto& c : picked.candidates) {
      TraceRecord r("grasp option");
      r.value("affordance", to_string(c.affordance)).value("belief", interval_text(c.belief));
      trace.push_back(std::move(r));
    }
    TraceRecord r("grasp");
    r.value("kind", picked.chosen.affordance.functor)
        .value("affordance", to_string(picked.chosen.affordance))
        .value("belief", interval_text(picked.chosen.belief));
    if (const StepNote* o = picked.step.find_note("orientHandleToward")) r.field("orientation", to_string(o->predicate));
    trace.push_back(std::move(r));
    *leaf = picked.step;
  }

  Scenario planned = s;
  planned.set_script(script);
  CheckResult check = check_moral_percept(planned, library, config);
  trace.push_back(TraceRecord("moral check").value("scope", "full script"));
  append_check_trace(trace, "full", check, config);
  trace.push_back(TraceRecord("accepted script").value("script", canonical(check.scenario.script())));

  ExecutionResult run = execute(check.scenario, library, config);
  trace.insert(trace.end(), run.trace.begin(), run.trace.end());
  trace.push_back(TraceRecord("done").field("steps", std::to_string(leaves(run.scenario.script()).size())));
  out.scenario = std::move(run.scenario);
  return out;
}

}  // namespace normkit
