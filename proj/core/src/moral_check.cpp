#include <algorithm>
#include <functional>
#include <set>

#include "normkit/format.hpp"
#include "normkit/goal_manager.hpp"

namespace normkit {

std::string_view to_string(ModificationOperator op) noexcept {
  switch (op) {
    case ModificationOperator::insert_alert_before_approach: return "insert_alert_before_approach";
    case ModificationOperator::announce_intent: return "announce_intent";
    case ModificationOperator::reorient_grasp: return "reorient_grasp";
    case ModificationOperator::reorder_steps: return "reorder_steps";
  }
  return "?";
}

std::optional<ModificationOperator> parse_operator(std::string_view text) noexcept {
  for (auto op : default_operators()) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

const std::vector<ModificationOperator>& default_operators() {
  static const std::vector<ModificationOperator> ops = {
      ModificationOperator::insert_alert_before_approach, ModificationOperator::announce_intent,
      ModificationOperator::reorient_grasp, ModificationOperator::reorder_steps};
  return ops;
}

void CheckConfig::validate() const {
  if (k == 0) throw DomainError("k must be at least 1");
  if (!(min_similarity >= 0.0 && min_similarity <= 1.0)) {
    throw DomainError("min_similarity must lie in [0,1]");
  }
}

MoralRejection::MoralRejection(Scenario best, std::string precedent,
                               std::vector<RankedPrecedent> ranking, std::size_t explored)
    : Error("no acceptable modification found; decisive precedent " + precedent + " is a violation"),
      best_(std::move(best)), precedent_(std::move(precedent)), ranking_(std::move(ranking)),
      explored_(explored) {}

namespace {

using Path = std::vector<std::size_t>;

std::string path_text(const Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i] + 1);
  }
  return out;
}

std::vector<ActionStep>& siblings(ActionScript& script, const Path& parent) {
  std::vector<ActionStep>* list = &script.steps;
  for (std::size_t i : parent) list = &(*list)[i].substeps;
  return *list;
}

const std::vector<ActionStep>& siblings(const ActionScript& script, const Path& parent) {
  const std::vector<ActionStep>* list = &script.steps;
  for (std::size_t i : parent) list = &(*list)[i].substeps;
  return *list;
}

bool untouched(const ActionStep& s) {
  if (s.is_leaf()) return s.status != StepStatus::executed;
  return std::all_of(s.substeps.begin(), s.substeps.end(), untouched);
}

// Calls visit(parent path, index, step) for every step, pre-order.
void walk(const std::vector<ActionStep>& list, Path& parent,
          const std::function<void(const Path&, std::size_t, const ActionStep&)>& visit) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    visit(parent, i, list[i]);
    parent.push_back(i);
    walk(list[i].substeps, parent, visit);
    parent.pop_back();
  }
}

bool same_params(const ActionStep& a, const ActionStep& b, std::size_t n) {
  if (a.params.size() < n || b.params.size() < n) return false;
  return std::equal(a.params.begin(), a.params.begin() + static_cast<std::ptrdiff_t>(n), b.params.begin());
}

ActionStep make_step(std::string name, std::vector<Term> params) {
  ActionStep s;
  s.name = std::move(name);
  s.params = std::move(params);
  return s;
}

struct Edit {
  ActionScript script;
  Modification modification;
};

void insert_before(const ActionScript& script, ModificationOperator op, std::string_view target,
                   std::string_view inserted, std::vector<Edit>& out) {
  Path parent;
  walk(script.steps, parent, [&](const Path& p, std::size_t i, const ActionStep& s) {
    if (!s.is_leaf() || s.name != target || !untouched(s) || s.params.size() < 2) return;
    const auto& before = siblings(script, p);
    if (i > 0 && before[i - 1].name == inserted && same_params(before[i - 1], s, 2)) return;
    ActionScript copy = script;
    auto& list = siblings(copy, p);
    ActionStep added = make_step(std::string(inserted), {s.params[0], s.params[1]});
    const std::string detail = to_string(added);
    list.insert(list.begin() + static_cast<std::ptrdiff_t>(i), std::move(added));
    Path site = p;
    site.push_back(i);
    out.push_back(Edit{std::move(copy), Modification{op, path_text(site), detail}});
  });
}

void reorient(const ActionScript& script, std::vector<Edit>& out) {
  Path parent;
  walk(script.steps, parent, [&](const Path& p, std::size_t i, const ActionStep& s) {
    if (!s.is_leaf() || s.name != "handover" || !untouched(s) || s.params.size() != 3) return;
    if (s.find_note("orientHandleToward")) return;
    ActionScript copy = script;
    StepNote note{Predicate{"orientHandleToward", {s.params[1]}}, std::nullopt};
    const std::string detail = to_string(note.predicate);
    siblings(copy, p)[i].notes.push_back(std::move(note));
    Path site = p;
    site.push_back(i);
    out.push_back(Edit{std::move(copy), Modification{ModificationOperator::reorient_grasp, path_text(site), detail}});
  });
}

void reorder(const ActionScript& script, std::vector<Edit>& out) {
  auto visit_list = [&](const Path& parent, const std::vector<ActionStep>& list) {
    for (std::size_t i = 0; i + 1 < list.size(); ++i) {
      if (!untouched(list[i]) || !untouched(list[i + 1])) continue;
      ActionScript copy = script;
      auto& l = siblings(copy, parent);
      std::swap(l[i], l[i + 1]);
      Path site = parent;
      site.push_back(i);
      out.push_back(Edit{std::move(copy),
                         Modification{ModificationOperator::reorder_steps, path_text(site),
                                      to_string(list[i + 1]) + " before " + to_string(list[i])}});
    }
  };
  Path root;
  visit_list(root, script.steps);
  walk(script.steps, root, [&](const Path& p, std::size_t i, const ActionStep& s) {
    if (s.is_leaf()) return;
    Path self = p;
    self.push_back(i);
    visit_list(self, s.substeps);
  });
}

}  // namespace

std::vector<ModifiedScenario> next_modified_action_scripts(const Scenario& s,
                                                           std::span<const ModificationOperator> operators) {
  std::vector<Edit> edits;
  for (auto op : operators) {
    switch (op) {
      case ModificationOperator::insert_alert_before_approach:
        insert_before(s.script(), op, "approach", "alert", edits);
        break;
      case ModificationOperator::announce_intent:
        insert_before(s.script(), op, "handover", "announce", edits);
        break;
      case ModificationOperator::reorient_grasp:
        reorient(s.script(), edits);
        break;
      case ModificationOperator::reorder_steps:
        reorder(s.script(), edits);
        break;
    }
  }

  std::set<std::string> seen{canonical(s.script())};
  std::vector<ModifiedScenario> out;
  for (auto& e : edits) {
    try {
      validate(e.script);
    } catch (const ModelError&) {
      continue;
    }
    if (!seen.insert(canonical(e.script)).second) continue;
    Scenario next = s;
    next.set_script(std::move(e.script));
    out.push_back(ModifiedScenario{std::move(next), std::move(e.modification)});
  }
  return out;
}

std::vector<RankedPrecedent> rank_precedents(const Scenario& s, const CaseLibrary& library,
                                             const CheckConfig& config) {
  std::vector<RankedPrecedent> out;
  for (auto& r : retrieve(library, s.dgroup(), config.k, config.scoring)) {
    out.push_back(RankedPrecedent{r.name(), r.score, r.acceptability(),
                                  std::move(r.best_gmap.candidate_inferences)});
  }
  return out;
}

const RankedPrecedent* decisive_precedent(const std::vector<RankedPrecedent>& ranking,
                                          const CheckConfig& config) {
  for (const auto& r : ranking) {
    if (r.score >= config.min_similarity) return &r;
  }
  return nullptr;
}

namespace {

class Search {
 public:
  Search(const CaseLibrary& library, const CheckConfig& config) : library_(library), config_(config) {}

  CheckResult run(const Scenario& root) {
    auto ranking = rank_precedents(root, library_, config_);
    ++explored_;
    const RankedPrecedent* decisive = decisive_precedent(ranking, config_);
    if (!decisive) {
      if (config_.policy == NoPrecedentPolicy::strict) {
        throw NoPrecedentError("no precedent reaches similarity " + format_floor());
      }
      return accept(root, ranking, ranking, {}, true);
    }
    if (decisive->acceptability == Acceptability::acceptable) return accept(root, ranking, ranking, {}, false);

    best_ = root;
    best_score_ = decisive->score;
    visited_.insert(canonical(root.script()));
    std::vector<Modification> path;
    if (auto found = descend(root, 0, path, ranking)) return std::move(*found);
    throw MoralRejection(std::move(*best_), decisive->name, std::move(ranking), explored_);
  }

 private:
  std::string format_floor() const { return format_fixed4(config_.min_similarity); }

  CheckResult accept(const Scenario& s, std::vector<RankedPrecedent> initial,
                     std::vector<RankedPrecedent> final_ranking, std::vector<Modification> path,
                     bool no_precedent) {
    CheckResult r{s, std::move(path), std::move(initial), std::move(final_ranking), explored_, no_precedent};
    return r;
  }

  std::optional<CheckResult> descend(const Scenario& s, std::size_t depth, std::vector<Modification>& path,
                                     const std::vector<RankedPrecedent>& initial) {
    if (depth >= config_.depth_limit) return std::nullopt;
    for (auto& candidate : next_modified_action_scripts(s, config_.operators)) {
      if (!visited_.insert(canonical(candidate.scenario.script())).second) continue;
      path.push_back(candidate.modification);
      auto ranking = rank_precedents(candidate.scenario, library_, config_);
      ++explored_;
      const RankedPrecedent* decisive = decisive_precedent(ranking, config_);
      const bool permissive_gap = !decisive && config_.policy == NoPrecedentPolicy::permissive;
      if (permissive_gap || (decisive && decisive->acceptability == Acceptability::acceptable)) {
        return accept(candidate.scenario, initial, std::move(ranking), path, permissive_gap);
      }
      if (decisive && decisive->score < best_score_) {
        best_ = candidate.scenario;
        best_score_ = decisive->score;
      }
      if (auto found = descend(candidate.scenario, depth + 1, path, initial)) return found;
      path.pop_back();
    }
    return std::nullopt;
  }

  const CaseLibrary& library_;
  const CheckConfig& config_;
  std::set<std::string> visited_;
  std::optional<Scenario> best_;
  double best_score_ = 0.0;
  std::size_t explored_ = 0;
};

}  // namespace

CheckResult check_moral_percept(const Scenario& s, const CaseLibrary& library, const CheckConfig& config) {
  config.validate();
  return Search(library, config).run(s);
}

}  // namespace normkit
