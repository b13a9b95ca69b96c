#include <algorithm>
#include <map>
#include <set>

#include "normkit/affordance.hpp"
#include "normkit/error.hpp"

namespace normkit {

std::vector<Predicate> AffordanceRule::feature_conjuncts() const {
  std::vector<Predicate> out;
  for (const auto& c : conjuncts) {
    if (c.source == FactSource::percept) out.push_back(c.predicate);
  }
  return out;
}

std::vector<Predicate> AffordanceRule::context_conjuncts() const {
  std::vector<Predicate> out;
  for (const auto& c : conjuncts) {
    if (c.source == FactSource::context) out.push_back(c.predicate);
  }
  return out;
}

std::vector<Fact> Scene::percepts() const {
  std::vector<Fact> out;
  std::copy_if(facts.begin(), facts.end(), std::back_inserter(out),
               [](const Fact& f) { return f.source == FactSource::percept; });
  return out;
}

std::vector<Fact> Scene::context() const {
  std::vector<Fact> out;
  std::copy_if(facts.begin(), facts.end(), std::back_inserter(out),
               [](const Fact& f) { return f.source == FactSource::context; });
  return out;
}

bool belief_precedes(const AffordanceBelief& a, const AffordanceBelief& b) {
  if (a.belief.alpha() != b.belief.alpha()) return a.belief.alpha() > b.belief.alpha();
  if (a.belief.beta() != b.belief.beta()) return a.belief.beta() > b.belief.beta();
  return to_string(a.affordance) < to_string(b.affordance);
}

namespace {

bool stronger(const BeliefInterval& a, const BeliefInterval& b) {
  if (a.alpha() != b.alpha()) return a.alpha() > b.alpha();
  return a.beta() > b.beta();
}

// Enumerates every consistent grounding of the rule's conjuncts, in written
// order, against the two fact pools.
class Grounder {
 public:
  Grounder(const AffordanceRule& rule, const std::vector<const Fact*>& percepts,
           const std::vector<const Fact*>& context)
      : rule_(rule), percepts_(percepts), context_(context) {}

  template <typename Sink>
  void run(Sink&& sink) {
    std::vector<const Fact*> chosen;
    extend(0, Binding{}, chosen, sink);
  }

 private:
  template <typename Sink>
  void extend(std::size_t index, const Binding& bindings, std::vector<const Fact*>& chosen,
              Sink& sink) {
    if (index == rule_.conjuncts.size()) {
      sink(bindings, chosen);
      return;
    }
    const Conjunct& conjunct = rule_.conjuncts[index];
    const auto& pool = conjunct.source == FactSource::percept ? percepts_ : context_;
    for (const Fact* fact : pool) {
      auto next = unify(conjunct.predicate, fact->predicate, bindings);
      if (!next) continue;
      chosen.push_back(fact);
      extend(index + 1, *next, chosen, sink);
      chosen.pop_back();
    }
  }

  const AffordanceRule& rule_;
  const std::vector<const Fact*>& percepts_;
  const std::vector<const Fact*>& context_;
};

}  // namespace

InferenceResult infer(std::span<const AffordanceRule> rules, const Scene& scene,
                      std::span<const Fact> context) {
  std::vector<const Fact*> percept_pool;
  std::vector<const Fact*> context_pool;
  for (const auto& f : scene.facts) {
    (f.source == FactSource::percept ? percept_pool : context_pool).push_back(&f);
  }
  for (const auto& f : context) context_pool.push_back(&f);

  // affordance text -> (predicate, groundings in rule order)
  std::map<std::string, std::pair<Predicate, std::vector<Grounding>>> gathered;
  std::vector<std::string> first_seen;

  for (const auto& rule : rules) {
    if (rule.conjuncts.empty()) {
      throw ModelError("rule '" + rule.id + "' has no conjuncts");
    }
    std::map<std::string, Grounding> best_for_rule;
    std::vector<std::string> order;
    Grounder(rule, percept_pool, context_pool).run([&](const Binding& b, const auto& chosen) {
      Grounding g;
      g.rule_id = rule.id;
      g.bindings = b;
      BeliefInterval folded = chosen.front()->belief;
      g.premises.push_back(*chosen.front());
      for (std::size_t i = 1; i < chosen.size(); ++i) {
        folded = conjoin(folded, chosen[i]->belief);
        g.premises.push_back(*chosen[i]);
      }
      g.antecedent = folded;
      g.conclusion = modus_ponens(folded, rule.interval);

      const Predicate affordance = substitute(rule.consequent, b);
      const std::string key = to_string(affordance);
      auto it = best_for_rule.find(key);
      if (it == best_for_rule.end()) {
        order.push_back(key);
        best_for_rule.emplace(key, std::move(g));
        if (!gathered.count(key)) {
          gathered.emplace(key, std::make_pair(affordance, std::vector<Grounding>{}));
          first_seen.push_back(key);
        }
      } else if (stronger(g.conclusion, it->second.conclusion)) {
        it->second = std::move(g);
      }
    });
    for (const auto& key : order) {
      gathered[key].second.push_back(std::move(best_for_rule.at(key)));
    }
  }

  InferenceResult result;
  for (const auto& key : first_seen) {
    auto& [affordance, groundings] = gathered.at(key);
    try {
      BeliefInterval fused = groundings.front().conclusion;
      for (std::size_t i = 1; i < groundings.size(); ++i) {
        fused = combine_evidence(fused, groundings[i].conclusion);
      }
      result.beliefs.push_back(AffordanceBelief{affordance, fused, std::move(groundings)});
    } catch (const TotalConflictError& e) {
      result.warnings.push_back("dropped " + key + ": " + e.what());
    }
  }
  std::sort(result.beliefs.begin(), result.beliefs.end(), belief_precedes);
  return result;
}

namespace {

constexpr std::string_view kRenamePrefix = "_r#";

Term rename_apart(const Term& t) {
  if (t.kind == Term::Kind::variable) return Term::variable(std::string(kRenamePrefix) + t.name);
  Term out = t;
  for (auto& a : out.args) a = rename_apart(a);
  return out;
}

Predicate rename_apart(const Predicate& p) {
  Predicate out = p;
  for (auto& a : out.args) a = rename_apart(a);
  return out;
}

}  // namespace

std::vector<SearchRequirement> abduce(std::span<const AffordanceRule> rules,
                                      const Predicate& goal) {
  std::vector<std::string> goal_vars;
  collect_variables(goal, goal_vars);
  const std::set<std::string> taken(goal_vars.begin(), goal_vars.end());

  std::vector<SearchRequirement> out;
  for (const auto& rule : rules) {
    auto mgu = unify_general(rename_apart(rule.consequent), goal);
    if (!mgu) continue;

    // Leftover rule-only variables get their written names back unless that
    // would capture a goal variable.
    std::vector<std::string> rule_vars;
    for (const auto& c : rule.conjuncts) collect_variables(c.predicate, rule_vars);
    Binding restore = *mgu;
    for (const auto& v : rule_vars) {
      const std::string renamed = std::string(kRenamePrefix) + v;
      if (restore.count(renamed)) continue;
      std::string name = v;
      for (int n = 1; taken.count(name); ++n) name = v + "_" + std::to_string(n);
      restore.emplace(renamed, Term::variable(name));
    }

    SearchRequirement req;
    req.rule_id = rule.id;
    req.rule_interval = rule.interval;
    for (const auto& v : rule_vars) {
      req.unifier.emplace(v, substitute(Term::variable(std::string(kRenamePrefix) + v), restore));
    }
    for (const auto& c : rule.conjuncts) {
      Predicate grounded = substitute(rename_apart(c.predicate), restore);
      (c.source == FactSource::percept ? req.percepts : req.context).push_back(std::move(grounded));
    }
    out.push_back(std::move(req));
  }
  std::stable_sort(out.begin(), out.end(), [](const SearchRequirement& a, const SearchRequirement& b) {
    return a.rule_interval.alpha() > b.rule_interval.alpha();
  });
  return out;
}

std::optional<AffordanceBelief> select_best(std::span<const AffordanceBelief> beliefs,
                                            double min_alpha) {
  if (min_alpha < 0.0 || min_alpha > 1.0) {
    throw DomainError("min_alpha must lie in [0,1]");
  }
  const AffordanceBelief* best = nullptr;
  for (const auto& b : beliefs) {
    if (b.belief.alpha() < min_alpha) continue;
    if (!best || belief_precedes(b, *best)) best = &b;
  }
  if (!best) return std::nullopt;
  return *best;
}

}  // namespace normkit
