#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "normkit/sme.hpp"
#include "sme_oracle.hpp"

using namespace normkit;
using namespace normkit::testing;

namespace {

std::vector<IndexPair> pairs_of(const sme::GMap& g) {
  std::vector<IndexPair> out;
  for (const auto& m : g.correspondences) out.emplace_back(m.base, m.target);
  return out;
}

sme::Dgroup group(const std::string& text) { return sme::parse_dgroup(text); }

}  // namespace

TEST_CASE("gmaps equal the maximal consistent hypothesis subsets") {
  Gen g(9001);
  int pairs = 0, attempts = 0, nontrivial = 0;
  while (pairs < 250) {
    ++attempts;
    REQUIRE(attempts < 20000);
    const auto base = random_dgroup(g, "b", DgroupShape{2, 3, 7, "b", 0.3, 5, true});
    const auto target = random_dgroup(g, "t", DgroupShape{2, 3, 7, "t", 0.3, 5, true});
    SmeOracle oracle(base, target);
    if (oracle.hypotheses().size() > 16) continue;
    ++pairs;

    const auto hyps = sme::build_match_hypotheses(base, target);
    std::set<IndexPair> got_mh;
    for (const auto& m : hyps.expressions) got_mh.insert({m.base, m.target});
    CHECK(got_mh == std::set<IndexPair>(oracle.hypotheses().begin(), oracle.hypotheses().end()));

    const auto gmaps = sme::extract_gmaps(base, target);
    std::set<std::vector<IndexPair>> got;
    for (const auto& gm : gmaps) {
      const auto key = pairs_of(gm);
      CHECK(got.insert(key).second);
      std::set<IndexPair> ents;
      for (const auto& e : gm.entity_map) ents.insert({e.base, e.target});
      CHECK(ents == oracle.entity_pairs(key));
      CHECK(gm.structural_score == doctest::Approx(oracle.score(key)));
    }
    const auto expected = oracle.maximal_sets();
    CAPTURE(sme::serialize(base));
    CAPTURE(sme::serialize(target));
    CHECK(got == expected);
    for (std::size_t i = 1; i < gmaps.size(); ++i) {
      CHECK(gmaps[i - 1].structural_score >= gmaps[i].structural_score);
    }
    if (!expected.empty() && !expected.begin()->empty()) ++nontrivial;
  }
  CHECK(nontrivial > 100);
}

TEST_CASE("similarity is a normalized score") {
  Gen g(9002);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_dgroup(g, "a");
    const auto b = random_dgroup(g, "b");
    const auto s = sme::similarity(a, b);
    CHECK(s.score >= 0.0);
    CHECK(s.score <= 1.0);
    const auto self = sme::similarity(a, a);
    CHECK(self.score == doctest::Approx(1.0));
    CHECK(sme::self_score(a) >= 0.0);
  }
}

TEST_CASE("deeper matches score higher") {
  const auto base = group(
      "(dgroup b (entities x y) (expr e1 (relation r x y)) (expr e2 (relation s x y)) "
      "(expr e3 (relation cause e1 e2)))");
  const auto flat = group("(dgroup t (entities p q) (expr e1 (relation r p q)) (expr e2 (relation s p q)))");
  const auto deep = group(
      "(dgroup t (entities p q) (expr e1 (relation r p q)) (expr e2 (relation s p q)) "
      "(expr e3 (relation cause e1 e2)))");
  const double self = sme::self_score(base);
  CHECK(self == doctest::Approx(3 + 2 * 0.8));
  CHECK(sme::similarity(base, flat).score == doctest::Approx(2.0 / self));
  CHECK(sme::similarity(base, deep).score == doctest::Approx(1.0));
}

TEST_CASE("function pairs align under matched parents and may rename") {
  const auto base = group(
      "(dgroup b (entities k) (expr f1 (function bladeOf k)) (expr e1 (attribute dirty f1)))");
  const auto target = group(
      "(dgroup t (entities s) (expr f1 (function edgeOf s)) (expr e1 (attribute dirty f1)))");
  const auto gmaps = sme::extract_gmaps(base, target);
  REQUIRE(gmaps.size() == 1);
  REQUIRE(gmaps[0].correspondences.size() == 2);
  CHECK(gmaps[0].correspondences[0].base_predicate == "bladeOf");
  CHECK(gmaps[0].correspondences[0].target_predicate == "edgeOf");
  REQUIRE(gmaps[0].entity_map.size() == 1);
  CHECK(gmaps[0].entity_map[0].target_id == "s");
}

TEST_CASE("typed and valued entities constrain the mapping") {
  const auto base = group("(dgroup b (entities (a agent) (v value)) (expr e1 (relation r a v)))");
  CHECK(sme::extract_gmaps(base, group("(dgroup t (entities (a agent) (v value)) (expr e1 (relation r a v)))"))
            .front()
            .correspondences.size() == 1);
  CHECK(sme::extract_gmaps(base, group("(dgroup t (entities (a agent) (w value)) (expr e1 (relation r a w)))"))
            .front()
            .correspondences.empty());
  CHECK(sme::extract_gmaps(base, group("(dgroup t (entities (a object) (v value)) (expr e1 (relation r a v)))"))
            .front()
            .correspondences.empty());
}

TEST_CASE("empty groups compare by entity types") {
  CHECK(sme::similarity(group("(dgroup a (entities (x agent)))"), group("(dgroup b (entities (y agent)))")).score == 1.0);
  CHECK(sme::similarity(group("(dgroup a (entities (x agent)))"), group("(dgroup b (entities (y object)))")).score == 0.0);
}

TEST_CASE("candidate inferences project unmatched structure") {
  const auto base = group(
      "(dgroup b (entities (a agent) (v agent) (bat object) (harm value)) "
      "(expr e1 (relation holding a bat)) (expr e2 (relation strikes a v)) "
      "(expr e3 (attribute outcome harm)) (expr e4 (relation causes e2 e3)) (expr e5 (relation hits v bat)))");
  const auto target = group(
      "(dgroup t (entities (robot agent) (knife object)) (expr e1 (relation holding robot knife)))");
  const auto s = sme::similarity(base, target);
  std::vector<std::string> texts;
  for (const auto& ci : s.best_gmap.candidate_inferences) texts.push_back(sme::to_string(ci));
  // strikes is unmatched and anchored through robot; its causes parent is the
  // outermost projection. hits(v, bat) is anchored by knife, v stays a skolem.
  CHECK(texts == std::vector<std::string>{"causes(strikes(robot,skolem1),outcome(harm))", "hits(skolem1,knife)"});

  Scene facts = sme::dgroup_facts(target);
  CHECK(sme::verify_candidate_inference(s.best_gmap.candidate_inferences[1], facts) == sme::Verdict::unknown);
  facts.facts.push_back(Fact{parse_predicate("hits(human,knife)"), BeliefInterval::certain(), FactSource::percept});
  CHECK(sme::verify_candidate_inference(s.best_gmap.candidate_inferences[1], facts) == sme::Verdict::holds);
  Scene negated = sme::dgroup_facts(target);
  negated.facts.push_back(Fact{parse_predicate("not(hits(human,knife))"), BeliefInterval::certain(), FactSource::percept});
  CHECK(sme::verify_candidate_inference(s.best_gmap.candidate_inferences[1], negated) == sme::Verdict::contradicted);
}

TEST_CASE("candidate inferences only mention target or skolem entities") {
  Gen g(9003);
  for (int i = 0; i < 300; ++i) {
    const auto base = random_dgroup(g, "b", DgroupShape{2, 4, 6, "b", 0.3});
    const auto target = random_dgroup(g, "t", DgroupShape{2, 4, 6, "t", 0.3});
    for (const auto& gm : sme::extract_gmaps(base, target)) {
      CHECK(gm.candidate_inferences.size() <= base.expressions.size() - gm.correspondences.size());
      for (const auto& ci : gm.candidate_inferences) {
        CHECK_FALSE(ci.matched);
        const auto p = template_predicate(ci);
        std::vector<std::string> consts;
        for (const auto& a : p.args) collect_constants(a, consts);
        for (const auto& c : consts) {
          const bool in_target = target.find_entity(c).has_value();
          const bool literal = base.find_entity(c) && base.entities[*base.find_entity(c)].type == sme::EntityType::value;
          CHECK((in_target || literal));
        }
      }
    }
  }
}

TEST_CASE("shipped precedents against the kitchen scenario") {
  const auto& lib = shipped_library();
  const auto s = shipped_scenario("kitchen_approach");
  std::map<std::string, double> scores;
  for (const auto& c : lib.cases()) scores[c.name()] = sme::similarity(c.dgroup, s.dgroup()).score;
  CHECK(scores.at("BBS") > scores.at("FS"));
  CHECK(scores.at("FS") > scores.at("HSS"));
}
