#pragma once

// Loaders for the shipped data directory.

#include <memory>
#include <string>

#include "normkit/affordance.hpp"
#include "normkit/case_library.hpp"
#include "normkit/scenario.hpp"
#include "process.hpp"

namespace normkit::testing {

inline RuleBase shipped_rules() {
  static const RuleBase rules = std::make_shared<const std::vector<AffordanceRule>>(
      parse_rule_file(read_file(data_path("rules/default.rules")), "default.rules"));
  return rules;
}

inline Scene shipped_scene(const std::string& name) {
  const auto p = data_path("scenes/" + name + ".scene");
  return parse_scene_file(read_file(p), p.string());
}

inline const CaseLibrary& shipped_library() {
  static const CaseLibrary lib = load_library(data_path("cases"));
  return lib;
}

inline Scenario shipped_scenario(const std::string& name) {
  Scenario s = load_scenario(data_path("scenarios/" + name + ".scenario"));
  s.set_rules(shipped_rules());
  return s;
}

}  // namespace normkit::testing
