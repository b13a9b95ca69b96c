#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "normkit/affordance.hpp"
#include "normkit/dgroup.hpp"

namespace normkit::sme {

/// Scoring constants. Scores are relative, so these are conventions rather
/// than measured values; the defaults are frozen for golden tests.
struct ScoringParams {
  double local_score = 1.0;
  double ancestor_bonus = 0.8;
};

/// A proposed correspondence between a base and a target expression.
struct MatchHypothesis {
  std::size_t base = 0;
  std::size_t target = 0;
  std::string base_id;
  std::string target_id;
  ExprKind kind = ExprKind::relation;
  std::string base_predicate;
  std::string target_predicate;  // differs from base_predicate only for functions
  double local_score = 1.0;

  friend bool operator==(const MatchHypothesis&, const MatchHypothesis&) = default;
};

struct EntityCorrespondence {
  std::size_t base = 0;
  std::size_t target = 0;
  std::string base_id;
  std::string target_id;

  friend bool operator==(const EntityCorrespondence&, const EntityCorrespondence&) = default;
};

struct MatchHypotheses {
  std::vector<MatchHypothesis> expressions;
  std::vector<EntityCorrespondence> entities;
};

/// Argument of a candidate-inference template.
struct TemplateArg;

/// An expression carried over from the base, written in target vocabulary.
struct ExprTemplate {
  std::string predicate;
  ExprKind kind = ExprKind::relation;
  bool matched = false;  // true when this node corresponds to a target expression
  std::vector<TemplateArg> args;
};

struct TemplateArg {
  enum class Kind { entity, skolem, expression };
  Kind kind = Kind::entity;
  std::string name;                    // target entity id or skolem<N>
  std::vector<ExprTemplate> nested;    // exactly one element when kind == expression
};

/// `causes(strikes(robot,human),outcome(harm))`
std::string to_string(const ExprTemplate& t);

/// Global mapping: a maximal structurally consistent set of correspondences.
struct GMap {
  std::vector<MatchHypothesis> correspondences;  // sorted by base index
  std::vector<EntityCorrespondence> entity_map;  // sorted by base index
  double structural_score = 0.0;
  std::vector<ExprTemplate> candidate_inferences;
};

struct SimilarityResult {
  double score = 0.0;  // in [0,1]
  GMap best_gmap;      // empty when nothing matched
  std::vector<GMap> all_gmaps;
};

/// Expression pairs with identical predicate and kind (relation or attribute)
/// plus function pairs aligned under a matched parent, and the entity pairs
/// those induce. Attributes pair only entities already aligned by a
/// relation (or entities no relation mentions on either side). Value-typed
/// entities pair only with the same-named value.
MatchHypotheses build_match_hypotheses(const Dgroup& base, const Dgroup& target,
                                       const ScoringParams& params = {});

/// All maximal structurally consistent gmaps, sorted by score descending
/// (ties by correspondence list). Exhaustive: cases here are small.
std::vector<GMap> extract_gmaps(const Dgroup& base, const Dgroup& target,
                                const ScoringParams& params = {});

/// Each correspondence scores its local score plus a bonus per matched
/// ancestor expression in the same gmap.
double structural_score(const GMap& gmap, const Dgroup& base, const ScoringParams& params = {});

/// Score of the best mapping of `group` onto itself.
double self_score(const Dgroup& group, const ScoringParams& params = {});

/// Best gmap score over max(self_score(base), self_score(target)).
SimilarityResult similarity(const Dgroup& base, const Dgroup& target,
                            const ScoringParams& params = {});

/// Unmatched base expressions that hang off the mapping, translated into
/// target terms. Unmapped base entities become skolem<N>; value-typed
/// entities are literals and keep their name.
std::vector<ExprTemplate> candidate_inferences(const GMap& gmap, const Dgroup& base);

enum class Verdict { holds, contradicted, unknown };
std::string_view to_string(Verdict v) noexcept;

/// Semantic check of a candidate inference against known facts. A fact
/// `not(T)` contradicts T. Skolems act as variables.
Verdict verify_candidate_inference(const ExprTemplate& candidate, const Scene& facts);

/// The template as a logic predicate (skolems become variables).
Predicate template_predicate(const ExprTemplate& t);

/// Every expression of a group as a ground fact, e.g. to verify candidate
/// inferences against a target description.
Scene dgroup_facts(const Dgroup& group);

}  // namespace normkit::sme
