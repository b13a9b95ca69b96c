#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "normkit/affordance.hpp"
#include "normkit/case_library.hpp"
#include "normkit/error.hpp"
#include "normkit/scenario.hpp"
#include "normkit/script.hpp"
#include "normkit/trace.hpp"

namespace normkit {

// --- goals and decomposition ------------------------------------------------

struct Goal {
  Predicate predicate;

  /// Throws DomainError unless the predicate is ground.
  explicit Goal(Predicate p);
};

class UnknownGoalError : public Error {
 public:
  using Error::Error;
};

/// Find, pickup or grasp resolution found nothing good enough.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Patterns decompose() understands, e.g. `possess(R,cutwith(T))`.
std::vector<std::string> known_goal_templates();

/// possess(R, cutwith(T)) ->
///   find(cutWith(self,O)), pickup(O), bring(O,R){approach(self,R), handover(self,R,O)}
/// deliver(R, O) -> pickup(O), bring(O,R){...}
ActionScript decompose(const Goal& goal);

// --- step resolution --------------------------------------------------------

struct FindResult {
  ActionStep step;  // resolved, affordance bound, belief noted
  Binding binding;  // object variable -> chosen object
  AffordanceBelief chosen;
  std::vector<SearchRequirement> requirements;
  std::vector<AffordanceBelief> candidates;  // ranked, matching the goal affordance
};

/// Back-chains from the step's affordance to the rules that can conclude
/// it, infers with those rules, and binds the best candidate reaching
/// min_alpha. Throws ResolutionError when none does.
FindResult resolve_find(const ActionStep& step, const Scene& scene,
                        std::span<const AffordanceRule> rules, std::span<const Fact> context = {},
                        double min_alpha = 0.5);

struct PickupResult {
  ActionStep step;  // resolved, grasp noted
  AffordanceBelief chosen;
  std::vector<AffordanceBelief> candidates;  // ranked grasp affordances for the object
};

/// Picks the strongest grasp affordance grasp*(self, o) for the step's
/// object. Choosing graspByBlade adds orientHandleToward(receiver).
/// Throws ResolutionError when no grasp reaches min_alpha.
PickupResult resolve_pickup(const ActionStep& step, const Scene& scene,
                            std::span<const AffordanceRule> rules, std::span<const Fact> context = {},
                            const std::optional<Term>& receiver = std::nullopt,
                            double min_alpha = 0.5);

// --- moral perception check -------------------------------------------------

enum class ModificationOperator { insert_alert_before_approach, announce_intent, reorient_grasp, reorder_steps };

std::string_view to_string(ModificationOperator op) noexcept;
std::optional<ModificationOperator> parse_operator(std::string_view text) noexcept;
/// insert_alert_before_approach, announce_intent, reorient_grasp, reorder_steps.
const std::vector<ModificationOperator>& default_operators();

struct Modification {
  ModificationOperator op = ModificationOperator::insert_alert_before_approach;
  std::string site;    // 1-based step path, e.g. "3.1"
  std::string detail;  // e.g. "alert(self,human)"
};

struct ModifiedScenario {
  Scenario scenario;
  Modification modification;
};

/// Every single-operator edit of the unexecuted part of the script, in
/// operator order then site order, valid and deduplicated by canonical form.
std::vector<ModifiedScenario> next_modified_action_scripts(
    const Scenario& s, std::span<const ModificationOperator> operators = default_operators());

enum class NoPrecedentPolicy { strict, permissive };

struct CheckConfig {
  std::size_t k = 3;
  std::size_t depth_limit = 4;
  /// Precedents scoring below this are not analogous enough to decide.
  double min_similarity = 0.3;
  NoPrecedentPolicy policy = NoPrecedentPolicy::permissive;
  std::vector<ModificationOperator> operators = default_operators();
  sme::ScoringParams scoring;

  /// Throws DomainError on k == 0 or min_similarity outside [0,1].
  void validate() const;
};

struct RankedPrecedent {
  std::string name;
  double score = 0.0;
  Acceptability acceptability = Acceptability::acceptable;
  std::vector<sme::ExprTemplate> candidate_inferences;
};

/// Top-k retrieval for the scenario's encoding.
std::vector<RankedPrecedent> rank_precedents(const Scenario& s, const CaseLibrary& library,
                                             const CheckConfig& config);

/// First ranked precedent at or above the similarity floor.
const RankedPrecedent* decisive_precedent(const std::vector<RankedPrecedent>& ranking,
                                          const CheckConfig& config);

struct CheckResult {
  Scenario scenario;
  std::vector<Modification> modifications;  // root to accepted descendant
  std::vector<RankedPrecedent> initial_ranking;
  std::vector<RankedPrecedent> final_ranking;
  std::size_t explored = 0;  // scenarios ranked
  bool no_precedent = false;  // accepted because nothing cleared the floor
};

/// Search for an acceptable version of the scenario exhausted its options.
class MoralRejection : public Error {
 public:
  MoralRejection(Scenario best, std::string precedent, std::vector<RankedPrecedent> ranking,
                 std::size_t explored);

  /// The explored scenario least similar to its decisive violation.
  const Scenario& best() const noexcept { return best_; }
  /// Name of the violation that decided against the original scenario.
  const std::string& precedent() const noexcept { return precedent_; }
  const std::vector<RankedPrecedent>& ranking() const noexcept { return ranking_; }
  std::size_t explored() const noexcept { return explored_; }

 private:
  Scenario best_;
  std::string precedent_;
  std::vector<RankedPrecedent> ranking_;
  std::size_t explored_;
};

/// Strict policy and no precedent cleared the floor.
class NoPrecedentError : public Error {
 public:
  using Error::Error;
};

/// Accepts the scenario when its decisive precedent is acceptable;
/// otherwise searches modifications depth-first (operator order, visited
/// set on canonical scripts, depth limit) and returns the first acceptable
/// descendant. Throws MoralRejection on exhaustion.
CheckResult check_moral_percept(const Scenario& s, const CaseLibrary& library,
                                const CheckConfig& config = {});

/// Records a check: the initial ranking, the decisive precedent, each
/// modification, and after a repair the new ranking and its top precedent.
void append_check_trace(Trace& trace, const std::string& phase, const CheckResult& check,
                        const CheckConfig& config);

// --- execution --------------------------------------------------------------

struct ExecutionResult {
  Scenario scenario;  // with every step executed
  Trace trace;
};

/// Runs the script step by step. Before each top-level step the prefix
/// through that step is checked again and any repair is spliced in;
/// leaves are then marked executed in order.
ExecutionResult execute(const Scenario& s, const CaseLibrary& library, const CheckConfig& config = {});

struct EpisodeResult {
  Scenario scenario;
  Trace trace;
};

/// decompose -> resolve_find -> resolve_pickup -> check_moral_percept ->
/// execute, all recorded in one trace. The scenario supplies goal, scene,
/// rules and the roster.
EpisodeResult run_episode(const Scenario& s, const CaseLibrary& library, const CheckConfig& config = {});

}  // namespace normkit
