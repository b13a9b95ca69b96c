#include "normkit/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "normkit/error.hpp"
#include "normkit/format.hpp"
#include "normkit/sexpr.hpp"

namespace normkit {

Scenario& Scenario::set_name(std::string v) { name_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_self_name(std::string v) { self_name_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_agents(std::vector<std::string> v) { agents_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_objects(std::vector<std::string> v) { objects_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_scene(Scene v) { scene_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_goal(std::optional<Predicate> v) { goal_ = std::move(v); return *this; }
Scenario& Scenario::set_outcome(std::optional<ScenarioOutcome> v) { outcome_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_script(ActionScript v) { script_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_rules(RuleBase v) { rules_ = std::move(v); touch(); return *this; }
Scenario& Scenario::set_min_alpha(double v) { min_alpha_ = v; touch(); return *this; }

const sme::Dgroup& Scenario::dgroup() const {
  if (!cache_) {
    static const std::vector<AffordanceRule> none;
    cache_ = scenario_to_dgroup(*this, rules_ ? std::span<const AffordanceRule>(*rules_)
                                              : std::span<const AffordanceRule>(none),
                                min_alpha_);
  }
  return *cache_;
}

namespace {

class Encoder {
 public:
  Encoder(const Scenario& s, std::span<const AffordanceRule> rules, double min_alpha)
      : s_(s), rules_(rules), min_alpha_(min_alpha), builder_(s.name()) {}

  sme::Dgroup run() {
    declare(s_.self_name(), sme::EntityType::agent);
    for (const auto& a : s_.agents()) declare(a, sme::EntityType::agent);
    for (const auto& o : s_.objects()) declare(o, sme::EntityType::object);

    const auto order = leaves(s_.script());
    for (std::size_t i = 0; i < order.size(); ++i) encode(*order[i], i);

    // Alert links need the approach that follows, so they come last.
    for (const auto& [warns_id, leaf, a, b] : alerts_) {
      for (std::size_t j = leaf + 1; j < approach_ids_.size(); ++j) {
        if (approach_ids_[j] && approach_args_[j] == std::make_pair(a, b)) {
          builder_.relation(next_id(), "precedes", {warns_id, *approach_ids_[j]});
          break;
        }
      }
    }

    if (const auto& outcome = s_.outcome()) {
      std::optional<std::string> cause;
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i]->name == outcome->step && main_ids_[i]) cause = main_ids_[i];
      }
      if (!cause) {
        throw ModelError("scenario '" + s_.name() + "': outcome step '" + outcome->step +
                         "' does not occur in the script");
      }
      if (!builder_.has(outcome->value)) builder_.entity(outcome->value, sme::EntityType::value);
      const std::string out_id = next_id();
      builder_.attribute(out_id, "outcome", outcome->value);
      builder_.relation(next_id(), "causes", {*cause, out_id});
    }
    return builder_.build();
  }

 private:
  void declare(const std::string& name, sme::EntityType type) {
    if (builder_.has(name)) throw ModelError("scenario '" + s_.name() + "' declares '" + name + "' twice");
    builder_.entity(name, type);
  }

  std::string next_id() { return "e" + std::to_string(++counter_); }

  std::string constant(const ActionStep& step, std::size_t index) {
    if (index >= step.params.size()) {
      throw ModelError("step " + to_string(step) + " is missing parameter " + std::to_string(index + 1));
    }
    const Term& t = step.params[index];
    if (t.is_variable()) throw ModelError("step " + to_string(step) + " has unbound parameter " + t.name);
    if (t.kind != Term::Kind::constant) {
      throw ModelError("step " + to_string(step) + ": parameter " + to_string(t) + " is not a constant");
    }
    const std::string& name = t.name == "self" ? s_.self_name() : t.name;
    if (!builder_.has(name)) {
      throw ModelError("step " + to_string(step) + " mentions undeclared '" + t.name + "'");
    }
    return name;
  }

  bool back_turned(const std::string& raw) const {
    for (const auto& f : s_.scene().facts) {
      const auto& p = f.predicate;
      if (p.functor == "backTurned" && p.arity() == 1 && p.args[0] == Term::constant(raw)) return true;
    }
    return false;
  }

  bool weapon_capable(const std::string& raw) {
    if (!inferred_) inferred_ = infer(rules_, s_.scene()).beliefs;
    for (const auto& b : *inferred_) {
      const auto& p = b.affordance;
      if (p.functor == "weaponAffordance" && p.arity() == 1 && p.args[0] == Term::constant(raw) &&
          b.belief.alpha() >= min_alpha_) {
        return true;
      }
    }
    return false;
  }

  void orientation(const ActionStep& step, const std::string& object) {
    for (const auto& note : step.notes) {
      const auto& p = note.predicate;
      if (p.functor != "orientHandleToward" || p.arity() != 1) continue;
      ActionStep holder;
      holder.name = step.name;
      holder.params = p.args;
      builder_.relation(next_id(), "handleToward", {object, constant(holder, 0)});
    }
  }

  void encode(const ActionStep& step, std::size_t leaf) {
    main_ids_.emplace_back();
    approach_ids_.emplace_back();
    approach_args_.emplace_back();
    const std::string& n = step.name;
    if (n == "pickup") {
      const std::string self = s_.self_name();
      const std::string o = constant(step, 0);
      if (held_.insert(o).second) {
        main_ids_[leaf] = next_id();
        builder_.relation(*main_ids_[leaf], "holding", {self, o});
        if (weapon_capable(step.params[0].name)) builder_.attribute(next_id(), "weaponAffordance", o);
      }
      orientation(step, o);
    } else if (n == "approach") {
      const std::string a = constant(step, 0);
      const std::string b = constant(step, 1);
      main_ids_[leaf] = approach_ids_[leaf] = next_id();
      approach_args_[leaf] = {a, b};
      builder_.relation(*main_ids_[leaf], "approaches", {a, b});
      if (back_turned(step.params[1].name)) builder_.relation(next_id(), "fromBehind", {a, b});
    } else if (n == "alert") {
      const std::string a = constant(step, 0);
      const std::string b = constant(step, 1);
      main_ids_[leaf] = next_id();
      builder_.relation(*main_ids_[leaf], "warns", {a, b});
      alerts_.push_back({*main_ids_[leaf], leaf, a, b});
    } else if (n == "announce") {
      main_ids_[leaf] = next_id();
      builder_.relation(*main_ids_[leaf], "announces", {constant(step, 0), constant(step, 1)});
    } else if (n == "handover") {
      const std::string a = constant(step, 0);
      const std::string b = constant(step, 1);
      const std::string o = constant(step, 2);
      main_ids_[leaf] = next_id();
      builder_.relation(*main_ids_[leaf], "handsOver", {a, b, o});
      orientation(step, o);
    }
  }

  struct Alert {
    std::string warns_id;
    std::size_t leaf;
    std::string a;
    std::string b;
  };

  const Scenario& s_;
  std::span<const AffordanceRule> rules_;
  double min_alpha_;
  sme::DgroupBuilder builder_;
  int counter_ = 0;
  std::set<std::string> held_;
  std::optional<std::vector<AffordanceBelief>> inferred_;
  std::vector<std::optional<std::string>> main_ids_;
  std::vector<std::optional<std::string>> approach_ids_;
  std::vector<std::pair<std::string, std::string>> approach_args_;
  std::vector<Alert> alerts_;
};

}  // namespace

sme::Dgroup scenario_to_dgroup(const Scenario& s, std::span<const AffordanceRule> rules,
                               double min_alpha) {
  return Encoder(s, rules, min_alpha).run();
}

// --- file format ------------------------------------------------------------

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class ScenarioReader {
 public:
  ScenarioReader(std::string_view source, const std::filesystem::path& base_dir)
      : source_(source), base_dir_(base_dir) {}

  Scenario read(const sexpr::Value& form) {
    if (!form.is_form("scenario")) fail(form, "expected (scenario <name> ...)");
    if (form.items.size() < 2 || !form.items[1].is_atom()) fail(form, "scenario needs a name");
    Scenario s;
    s.set_name(form.items[1].text);
    Scene scene;
    std::set<std::string> seen;
    std::vector<Fact> extra;
    for (std::size_t i = 2; i < form.items.size(); ++i) {
      const sexpr::Value& item = form.items[i];
      const std::string head(item.head());
      if (head.empty()) fail(item, "expected a (key ...) form");
      const bool repeatable = head == "percept" || head == "context";
      if (!repeatable && !seen.insert(head).second) fail(item, "duplicate (" + head + " ...) form");
      if (head == "self") {
        s.set_self_name(single_atom(item));
      } else if (head == "agents") {
        s.set_agents(atoms(item));
      } else if (head == "objects") {
        s.set_objects(atoms(item));
      } else if (head == "scene") {
        if (item.items.size() != 2 || !item.items[1].is_string()) fail(item, "scene reads (scene \"path\")");
        const auto path = base_dir_ / item.items[1].text;
        scene = parse_scene_file(read_file(path), path.string());
      } else if (repeatable) {
        extra.push_back(fact(item, head == "percept" ? FactSource::percept : FactSource::context));
      } else if (head == "goal") {
        if (item.items.size() != 2) fail(item, "goal reads (goal (predicate ...))");
        Predicate g = parse_sexpr_predicate(item.items[1], source_);
        if (!g.is_ground()) fail(item.items[1], "goal must be ground");
        s.set_goal(std::move(g));
      } else if (head == "outcome") {
        if (item.items.size() != 3 || !item.items[1].is_atom() || !item.items[2].is_atom()) {
          fail(item, "outcome reads (outcome <value> <step>)");
        }
        s.set_outcome(ScenarioOutcome{item.items[1].text, item.items[2].text});
      } else if (head == "script") {
        s.set_script(parse_script(item, source_));
      } else {
        fail(item, "unknown scenario form '" + head + "'");
      }
    }
    for (auto& f : extra) {
      for (const auto& prior : scene.facts) {
        if (prior.predicate == f.predicate && prior.source == f.source) {
          throw ParseError(std::string(source_), extra_pos_[&f - extra.data()],
                           "duplicate fact " + to_string(f.predicate));
        }
      }
      for (const auto& t : f.predicate.args) {
        std::vector<std::string> names;
        collect_constants(t, names);
        for (auto& n : names) {
          if (n != "self" && std::find(scene.objects.begin(), scene.objects.end(), n) == scene.objects.end()) {
            scene.objects.push_back(n);
          }
        }
      }
      scene.facts.push_back(std::move(f));
    }
    s.set_scene(std::move(scene));
    try {
      validate(s.script());
    } catch (const ModelError& e) {
      fail(form, std::string("invalid script: ") + e.what());
    }
    return s;
  }

 private:
  [[noreturn]] void fail(const sexpr::Value& at, const std::string& message) const {
    throw ParseError(std::string(source_), at.pos, message);
  }

  std::string single_atom(const sexpr::Value& item) const {
    if (item.items.size() != 2 || !item.items[1].is_atom()) fail(item, "expected one name");
    return item.items[1].text;
  }

  std::vector<std::string> atoms(const sexpr::Value& item) const {
    std::vector<std::string> out;
    for (std::size_t i = 1; i < item.items.size(); ++i) {
      const auto& v = item.items[i];
      if (!v.is_atom() || is_variable_name(v.text)) fail(v, "expected a constant name");
      if (std::find(out.begin(), out.end(), v.text) != out.end()) fail(v, "duplicate name '" + v.text + "'");
      out.push_back(v.text);
    }
    return out;
  }

  Fact fact(const sexpr::Value& item, FactSource source) {
    if (item.items.size() != 2 && item.items.size() != 4) {
      fail(item, "fact reads (" + std::string(item.head()) + " (pred args...) [alpha beta])");
    }
    Fact f;
    f.source = source;
    f.predicate = parse_sexpr_predicate(item.items[1], source_);
    if (!f.predicate.is_ground()) fail(item.items[1], "facts must be ground");
    if (item.items.size() == 4) {
      double a = 0;
      double b = 0;
      if (!item.items[2].is_atom() || !parse_double(item.items[2].text, a)) fail(item.items[2], "expected a number");
      if (!item.items[3].is_atom() || !parse_double(item.items[3].text, b)) fail(item.items[3], "expected a number");
      try {
        f.belief = BeliefInterval(a, b);
      } catch (const DomainError& e) {
        fail(item.items[2], std::string("interval error: ") + e.what());
      }
    }
    extra_pos_.push_back(item.pos);
    return f;
  }

  std::string_view source_;
  std::filesystem::path base_dir_;
  std::vector<SourcePosition> extra_pos_;
};

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source_name,
                        const std::filesystem::path& base_dir) {
  const auto forms = sexpr::read_all(text, source_name);
  if (forms.size() != 1) {
    throw ParseError(std::string(source_name), forms.empty() ? SourcePosition{1, 1} : forms[1].pos,
                     "expected exactly one (scenario ...) form");
  }
  return ScenarioReader(source_name, base_dir).read(forms.front());
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.string(), path.parent_path());
}

}  // namespace normkit
