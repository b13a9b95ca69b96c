#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "normkit/affordance.hpp"
#include "normkit/dgroup.hpp"
#include "normkit/script.hpp"

namespace normkit {

/// `(outcome positive handover)`: the last leaf named `step` causes the
/// outcome value.
struct ScenarioOutcome {
  std::string value;
  std::string step;

  friend bool operator==(const ScenarioOutcome&, const ScenarioOutcome&) = default;
};

using RuleBase = std::shared_ptr<const std::vector<AffordanceRule>>;

/// The situation under moral scrutiny: who and what is involved, the scene
/// the robot perceives, and the script it intends to run. The analogical
/// encoding is cached and rebuilt after any change.
class Scenario {
 public:
  Scenario() = default;

  const std::string& name() const noexcept { return name_; }
  /// Constant the agent uses for itself in scenes and scripts is `self`;
  /// this is the entity name it gets in the encoding.
  const std::string& self_name() const noexcept { return self_name_; }
  const std::vector<std::string>& agents() const noexcept { return agents_; }
  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const Scene& scene() const noexcept { return scene_; }
  const std::optional<Predicate>& goal() const noexcept { return goal_; }
  const std::optional<ScenarioOutcome>& outcome() const noexcept { return outcome_; }
  const ActionScript& script() const noexcept { return script_; }
  const RuleBase& rules() const noexcept { return rules_; }
  double min_alpha() const noexcept { return min_alpha_; }

  Scenario& set_name(std::string v);
  Scenario& set_self_name(std::string v);
  Scenario& set_agents(std::vector<std::string> v);
  Scenario& set_objects(std::vector<std::string> v);
  Scenario& set_scene(Scene v);
  Scenario& set_goal(std::optional<Predicate> v);
  Scenario& set_outcome(std::optional<ScenarioOutcome> v);
  Scenario& set_script(ActionScript v);
  Scenario& set_rules(RuleBase v);
  Scenario& set_min_alpha(double v);

  /// Encoding of the current state; see scenario_to_dgroup.
  const sme::Dgroup& dgroup() const;
  bool encoding_cached() const noexcept { return cache_.has_value(); }

 private:
  void touch() noexcept { cache_.reset(); }

  std::string name_ = "scenario";
  std::string self_name_ = "robot";
  std::vector<std::string> agents_;
  std::vector<std::string> objects_;
  Scene scene_;
  std::optional<Predicate> goal_;
  std::optional<ScenarioOutcome> outcome_;
  ActionScript script_;
  RuleBase rules_;
  double min_alpha_ = 0.5;
  mutable std::optional<sme::Dgroup> cache_;
};

/// Encodes the scenario's leaves in order:
///   pickup(o)          holding(self,o), weaponAffordance(o) when inferred
///   approach(a,b)      approaches(a,b), fromBehind(a,b) if backTurned(b)
///   alert(a,b)         warns(a,b), precedes(warns, approaches) when an
///                      approach(a,b) follows
///   announce(a,b)      announces(a,b)
///   handover(a,b,o)    handsOver(a,b,o)
///   note orientHandleToward(r) on a step with object o: handleToward(o,r)
/// plus outcome(v) and causes(step, outcome) when an outcome is declared.
/// Throws ModelError on unbound parameters or undeclared constants.
sme::Dgroup scenario_to_dgroup(const Scenario& s, std::span<const AffordanceRule> rules,
                               double min_alpha = 0.5);

/// File form:
///   (scenario kitchen
///     (self robot) (agents human) (objects knife tomato)
///     (scene "../scenes/kitchen.scene")       ; relative to the file
///     (percept (hasSharpEdge knife) 0.95 1)   ; extra facts, interval optional
///     (context (backTurned human))
///     (goal (possess human (cutwith tomato)))
///     (outcome positive handover)
///     (script ...))
/// Scene paths resolve against `base_dir`.
Scenario parse_scenario(std::string_view text, std::string_view source_name,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace normkit
