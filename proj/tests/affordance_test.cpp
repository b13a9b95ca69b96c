#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "normkit/affordance.hpp"

using namespace normkit;
using namespace normkit::testing;

namespace {

const AffordanceBelief* find_belief(const InferenceResult& r, const std::string& text) {
  for (const auto& b : r.beliefs) {
    if (to_string(b.affordance) == text) return &b;
  }
  return nullptr;
}

// Every grounding of every rule, by exhaustive product over the fact pools.
// Result: affordance text -> rule id -> strongest conclusion for that rule.
std::map<std::string, std::map<std::string, BeliefInterval>> brute_force(const std::vector<AffordanceRule>& rules,
                                                                         const Scene& scene) {
  std::map<std::string, std::map<std::string, BeliefInterval>> out;
  for (const auto& rule : rules) {
    std::vector<std::vector<const Fact*>> pools;
    for (const auto& c : rule.conjuncts) {
      std::vector<const Fact*> pool;
      for (const auto& f : scene.facts) {
        if (f.source == c.source) pool.push_back(&f);
      }
      pools.push_back(pool);
    }
    std::vector<std::size_t> idx(pools.size(), 0);
    bool any_empty = std::any_of(pools.begin(), pools.end(), [](const auto& p) { return p.empty(); });
    while (!any_empty) {
      Binding b;
      bool ok = true;
      BeliefInterval a = BeliefInterval::certain();
      for (std::size_t i = 0; i < pools.size() && ok; ++i) {
        auto next = unify(rule.conjuncts[i].predicate, pools[i][idx[i]]->predicate, b);
        if (!next) {
          ok = false;
          break;
        }
        b = *next;
        a = i == 0 ? pools[i][idx[i]]->belief : conjoin(a, pools[i][idx[i]]->belief);
      }
      if (ok) {
        const auto concl = modus_ponens(a, rule.interval);
        const auto key = to_string(substitute(rule.consequent, b));
        auto [it, fresh] = out[key].try_emplace(rule.id, concl);
        if (!fresh) {
          const auto& cur = it->second;
          if (concl.alpha() > cur.alpha() || (concl.alpha() == cur.alpha() && concl.beta() > cur.beta())) {
            it->second = concl;
          }
        }
      }
      std::size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("knife rule derives [0.76, 1]") {
  const auto rules = parse_rule_file("r1 [0.8,1]: hasSharpEdge(O) & @ctx domain(X,kitchen) => cutWith(X,O)");
  const auto scene = parse_scene_file("objects: knife\nhasSharpEdge(knife) @ [0.95,1]\n@ctx domain(self,kitchen) @ [1,1]\n");
  const auto result = infer(rules, scene);
  REQUIRE(result.beliefs.size() == 1);
  const auto& b = result.beliefs[0];
  CHECK(to_string(b.affordance) == "cutWith(self,knife)");
  CHECK(std::abs(b.belief.alpha() - 0.95 * 1.0 * 0.8) <= 1e-9);
  CHECK(b.belief.beta() == 1.0);
  CHECK(to_string(b.belief) == "[0.76, 1]");
  REQUIRE(b.derivation.size() == 1);
  CHECK(b.derivation[0].rule_id == "r1");
  CHECK(b.derivation[0].premises.size() == 2);
  CHECK(b.derivation[0].antecedent == BeliefInterval(0.95, 1.0));
}

TEST_CASE("context facts can come from the caller") {
  const auto rules = parse_rule_file("r1 [0.8,1]: hasSharpEdge(O) & @ctx domain(X,kitchen) => cutWith(X,O)");
  const auto scene = parse_scene_file("objects: knife\nhasSharpEdge(knife) @ [0.95,1]\n");
  CHECK(infer(rules, scene).beliefs.empty());
  const std::vector<Fact> ctx = {Fact{parse_predicate("domain(self,kitchen)"), BeliefInterval::certain(),
                                      FactSource::context}};
  CHECK(infer(rules, scene, ctx).beliefs.size() == 1);
}

TEST_CASE("shipped kitchen scene") {
  const auto rules = shipped_rules();
  const auto result = infer(*rules, shipped_scene("kitchen"));
  const auto* cut = find_belief(result, "cutWith(self,knife)");
  REQUIRE(cut);
  CHECK(to_string(cut->belief) == "[0.76, 1]");
  const auto* handle = find_belief(result, "graspByHandle(self,knife)");
  REQUIRE(handle);
  // g2 (0.9 * 0.9 = 0.81) fused with g3 (0.5).
  CHECK(handle->belief.alpha() == doctest::Approx(1 - (1 - 0.81) * (1 - 0.5)));
  CHECK(handle->derivation.size() == 2);
  CHECK(find_belief(result, "graspByBlade(self,knife)") == nullptr);
  CHECK(find_belief(result, "weaponAffordance(knife)"));
  CHECK(std::is_sorted(result.beliefs.begin(), result.beliefs.end(), belief_precedes));
}

TEST_CASE("inference agrees with exhaustive grounding") {
  Gen g(8101);
  int derived = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto rules = random_rules(g);
    const auto scene = random_scene(g);
    const auto result = infer(rules, scene);
    const auto expected = brute_force(rules, scene);

    std::set<std::string> got;
    for (const auto& b : result.beliefs) {
      const auto key = to_string(b.affordance);
      got.insert(key);
      REQUIRE(expected.count(key));
      const auto& per_rule = expected.at(key);
      REQUIRE(b.derivation.size() == per_rule.size());
      std::optional<BeliefInterval> fused;
      for (const auto& d : b.derivation) {
        // Sound: each premise is a scene fact of the right source and the
        // bindings reproduce it from the conjunct.
        const auto* rule = &*std::find_if(rules.begin(), rules.end(), [&](const auto& r) { return r.id == d.rule_id; });
        REQUIRE(d.premises.size() == rule->conjuncts.size());
        for (std::size_t k = 0; k < d.premises.size(); ++k) {
          CHECK(std::find(scene.facts.begin(), scene.facts.end(), d.premises[k]) != scene.facts.end());
          CHECK(d.premises[k].source == rule->conjuncts[k].source);
          CHECK(substitute(rule->conjuncts[k].predicate, d.bindings) == d.premises[k].predicate);
        }
        CHECK(substitute(rule->consequent, d.bindings) == b.affordance);
        CHECK(d.conclusion == per_rule.at(d.rule_id));
        fused = fused ? combine_evidence(*fused, d.conclusion) : d.conclusion;
      }
      CHECK(b.belief == *fused);
      ++derived;
    }
    // Complete: anything derivable is reported or explicitly dropped.
    CHECK(got.size() + result.warnings.size() == expected.size());
  }
  CHECK(derived > 100);
}

TEST_CASE("certain-plausibility rules are monotone in the evidence") {
  Gen g(8102);
  for (int i = 0; i < 300; ++i) {
    auto rules = random_rules(g);
    for (auto& r : rules) r.interval = BeliefInterval(r.interval.alpha(), 1.0);
    Scene scene = random_scene(g);
    const auto before = infer(rules, scene);
    Scene more = scene;
    for (const auto& f : random_scene(g).facts) {
      const bool dup = std::any_of(more.facts.begin(), more.facts.end(), [&](const Fact& o) {
        return o.predicate == f.predicate && o.source == f.source;
      });
      if (!dup) more.facts.push_back(f);
    }
    more.objects = {"knife", "tomato", "board", "cup", "spoon"};
    const auto after = infer(rules, more);
    CHECK(after.warnings.empty());
    for (const auto& b : before.beliefs) {
      const auto* a = find_belief(after, to_string(b.affordance));
      REQUIRE(a);
      CHECK(a->belief.alpha() >= b.belief.alpha() - 1e-12);
      CHECK(a->belief.beta() == 1.0);
    }
  }
}

TEST_CASE("abduction lists exactly the rules that can conclude the goal") {
  Gen g(8103);
  for (int i = 0; i < 300; ++i) {
    const auto rules = random_rules(g);
    const int q = g.between(0, 2);
    Predicate goal{"aff" + std::to_string(q), {}};
    for (int a = 0; a < consequent_arity(q); ++a) {
      goal.args.push_back(g.chance(0.5) ? Term::variable("G" + std::to_string(a)) : Term::constant("self"));
    }
    const auto reqs = abduce(rules, goal);
    std::set<std::string> ids;
    for (const auto& r : reqs) ids.insert(r.rule_id);
    for (const auto& r : rules) {
      CHECK(ids.count(r.id) == (unify_general(r.consequent, goal).has_value() ? 1u : 0u));
    }
    for (std::size_t k = 1; k < reqs.size(); ++k) {
      CHECK(reqs[k - 1].rule_interval.alpha() >= reqs[k].rule_interval.alpha());
    }
    // Whatever inference derives for the goal comes from an abduced rule.
    const auto scene = random_scene(g);
    for (const auto& b : infer(rules, scene).beliefs) {
      if (!unify(goal, b.affordance)) continue;
      for (const auto& d : b.derivation) CHECK(ids.count(d.rule_id));
    }
  }
}

TEST_CASE("abduction for the cutting goal") {
  const auto rules = shipped_rules();
  const auto reqs = abduce(*rules, parse_predicate("cutWith(self,O)"));
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].rule_id == "r1");
  REQUIRE(reqs[0].percepts.size() == 1);
  CHECK(to_string(reqs[0].percepts[0]) == "hasSharpEdge(O)");
  REQUIRE(reqs[0].context.size() == 1);
  CHECK(to_string(reqs[0].context[0]) == "domain(self,kitchen)");
}

TEST_CASE("conflicting rules are dropped with a warning") {
  const auto rules = parse_rule_file("a [1,1]: p(O) => q(O)\nb [0,0]: p(O) => q(O)\n");
  const auto scene = parse_scene_file("objects: k\np(k)\n");
  const auto result = infer(rules, scene);
  CHECK(result.beliefs.empty());
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("q(k)") != std::string::npos);
}

TEST_CASE("selection honours the threshold and ranking") {
  std::vector<AffordanceBelief> beliefs = {
      {parse_predicate("b(x)"), BeliefInterval(0.6, 1.0), {}},
      {parse_predicate("a(x)"), BeliefInterval(0.6, 1.0), {}},
      {parse_predicate("c(x)"), BeliefInterval(0.4, 1.0), {}},
  };
  auto best = select_best(beliefs, 0.5);
  REQUIRE(best);
  CHECK(to_string(best->affordance) == "a(x)");
  CHECK_FALSE(select_best(beliefs, 0.7));
  CHECK_THROWS_AS(select_best(beliefs, 1.5), DomainError);
}
