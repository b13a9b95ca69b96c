#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "normkit/belief.hpp"
#include "normkit/logic.hpp"

namespace normkit {

/// Where a fact, or the fact a conjunct must be grounded against, comes from:
/// perception (colour, shape, parts, relations) or the agent's context
/// (beliefs, goals, role, location).
enum class FactSource { percept, context };

struct Conjunct {
  Predicate predicate;
  FactSource source = FactSource::percept;

  friend bool operator==(const Conjunct&, const Conjunct&) = default;
};

/// `features & context => affordance` with a rule interval.
///
/// Conjuncts are kept in written order; derivations fold them in that order.
/// Every consequent variable occurs in some conjunct.
struct AffordanceRule {
  std::string id;
  std::vector<Conjunct> conjuncts;
  Predicate consequent;
  BeliefInterval interval = BeliefInterval::vacuous();

  std::vector<Predicate> feature_conjuncts() const;
  std::vector<Predicate> context_conjuncts() const;

  friend bool operator==(const AffordanceRule&, const AffordanceRule&) = default;
};

struct Fact {
  Predicate predicate;  // ground
  BeliefInterval belief = BeliefInterval::certain();
  FactSource source = FactSource::percept;

  friend bool operator==(const Fact&, const Fact&) = default;
};

/// Declarative stand-in for a perceived scene plus any context facts it
/// carries. Percept facts only mention constants listed in `objects`
/// (the agent constant `self` excepted).
struct Scene {
  std::vector<std::string> objects;
  std::vector<Fact> facts;

  std::vector<Fact> percepts() const;
  std::vector<Fact> context() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// One way a rule fired: the bindings, the facts used for each conjunct in
/// written order, the folded antecedent and the rule's conclusion.
struct Grounding {
  std::string rule_id;
  Binding bindings;
  std::vector<Fact> premises;
  BeliefInterval antecedent = BeliefInterval::certain();
  BeliefInterval conclusion = BeliefInterval::vacuous();
};

/// A derived affordance. When several rules conclude it, `derivation` lists
/// one grounding per rule in rule-base order and `belief` is their left fold
/// under combine_evidence.
struct AffordanceBelief {
  Predicate affordance;
  BeliefInterval belief = BeliefInterval::vacuous();
  std::vector<Grounding> derivation;
};

struct InferenceResult {
  std::vector<AffordanceBelief> beliefs;
  /// Affordances dropped because their evidence was totally conflicting.
  std::vector<std::string> warnings;
};

/// Total order used everywhere beliefs are ranked: alpha desc, beta desc,
/// then affordance text ascending.
bool belief_precedes(const AffordanceBelief& a, const AffordanceBelief& b);

/// Grounds every rule against the scene and context. Feature conjuncts match
/// percept facts; context conjuncts match context facts (those in the scene
/// plus `context`). Within one rule, the strongest grounding per affordance
/// is kept; different rules are then fused with combine_evidence.
InferenceResult infer(std::span<const AffordanceRule> rules, const Scene& scene,
                      std::span<const Fact> context = {});

/// What perception and context must supply for one rule to conclude a goal.
struct SearchRequirement {
  std::string rule_id;
  BeliefInterval rule_interval = BeliefInterval::vacuous();
  Binding unifier;                  // rule variables -> goal terms
  std::vector<Predicate> percepts;  // visual-search targets
  std::vector<Predicate> context;   // context requirements
};

/// Back-chains from a (possibly non-ground) goal affordance. One requirement
/// set per rule whose consequent unifies with the goal, ordered by rule
/// alpha descending, rule-base order on ties.
std::vector<SearchRequirement> abduce(std::span<const AffordanceRule> rules, const Predicate& goal);

/// First belief in ranked order whose alpha reaches `min_alpha`.
std::optional<AffordanceBelief> select_best(std::span<const AffordanceBelief> beliefs,
                                            double min_alpha);

// --- text formats -----------------------------------------------------------
//
// Rule file, one rule per line, `#` starts a comment:
//   r1 [0.8,1]: hasSharpEdge(O) & @ctx domain(X,kitchen) => cutWith(X,O)
//
// Scene file:
//   objects: knife, tomato
//   hasSharpEdge(knife) @ [0.95,1]
//   @ctx domain(self,kitchen) @ [1,1]
// The interval may be omitted and defaults to [1,1].

std::vector<AffordanceRule> parse_rule_file(std::string_view text,
                                            std::string_view source_name = "<rules>");
std::string to_string(const AffordanceRule& rule);
std::string serialize_rules(std::span<const AffordanceRule> rules);

Scene parse_scene_file(std::string_view text, std::string_view source_name = "<scene>");
std::string to_string(const Fact& fact);
std::string serialize_scene(const Scene& scene);

/// Parses a single predicate such as `possess(human,cutwith(tomato))`.
Predicate parse_predicate(std::string_view text, std::string_view source_name = "<predicate>");

/// Checks the roster invariant and groundness; throws ModelError.
void validate_scene(const Scene& scene);

}  // namespace normkit
