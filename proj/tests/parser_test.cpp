#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "normkit/case_library.hpp"
#include "normkit/dgroup.hpp"
#include "normkit/error.hpp"
#include "normkit/sexpr.hpp"

using namespace normkit;
using namespace normkit::testing;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> corpus(const std::string& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(data_path(dir))) {
    if (e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Any exception other than ParseError escapes and fails the test case.
template <typename Parse>
void expect_clean_failure(Parse&& parse, const std::string& text, std::size_t& rejected) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    ++rejected;
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
    CHECK(e.position().line >= 1);
    CHECK(e.position().line <= lines);
    CHECK(e.position().column >= 1);
    CHECK(std::string(e.what()).find(":" + std::to_string(e.position().line) + ":") != std::string::npos);
  }
}

}  // namespace

TEST_CASE("shipped rule and scene files are serialization fixed points") {
  for (const auto& p : corpus("rules", ".rules")) {
    CAPTURE(p);
    const auto rules = parse_rule_file(read_file(p), p.string());
    CHECK_FALSE(rules.empty());
    const auto text = serialize_rules(rules);
    const auto again = parse_rule_file(text);
    CHECK(again == rules);
    CHECK(serialize_rules(again) == text);
  }
  for (const auto& p : corpus("scenes", ".scene")) {
    CAPTURE(p);
    const auto scene = parse_scene_file(read_file(p), p.string());
    const auto text = serialize_scene(scene);
    const auto again = parse_scene_file(text);
    CHECK(again == scene);
    CHECK(serialize_scene(again) == text);
  }
}

TEST_CASE("shipped cases are serialization fixed points") {
  for (const auto& p : corpus("cases", ".case")) {
    CAPTURE(p);
    const auto c = parse_case(read_file(p), p.string());
    CHECK(c.dgroup.annotations.empty());
    const auto text = serialize_case(c);
    const auto again = parse_case(text);
    CHECK(again == c);
    CHECK(serialize_case(again) == text);
  }
}

TEST_CASE("rule parser details") {
  const auto rules = parse_rule_file(
      "r1 [0.8,1]: hasSharpEdge(O) & @ctx domain(X,kitchen) => cutWith(X,O)  # trailing\n");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].conjuncts.size() == 2);
  CHECK(rules[0].conjuncts[1].source == FactSource::context);
  CHECK(rules[0].interval == BeliefInterval(0.8, 1.0));
  CHECK(to_string(rules[0]) == "r1 [0.8,1]: hasSharpEdge(O) & @ctx domain(X,kitchen) => cutWith(X,O)");

  CHECK_THROWS_AS(parse_rule_file("r1 [0.9,0.8]: p(O) => q(O)"), ParseError);
  CHECK_THROWS_AS(parse_rule_file("r1 [0.9,1]: p(O) => q(Y)"), ParseError);
  CHECK_THROWS_AS(parse_rule_file("r1 [0.9,1]: p(O) => q(O)\nr1 [0.9,1]: p(O) => q(O)"), ParseError);
  CHECK_THROWS_AS(parse_rule_file("r1 [0.9,1]: p(O) => q(O)\nr2 [0.9,1]: p(O,O) => q(O)"), ParseError);
  try {
    parse_rule_file("r1 [0.9,1]: p(O) => q(O)\nr2 [0.9,1]: p(O) => Q(O)", "x.rules");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position().line == 2);
    CHECK(std::string(e.what()).rfind("x.rules:2:", 0) == 0);
  }
}

TEST_CASE("scene parser details") {
  const auto s = parse_scene_file("objects: knife\nhasSharpEdge(knife) @ [0.95,1]\n@ctx domain(self,kitchen)\n");
  CHECK(s.objects == std::vector<std::string>{"knife"});
  REQUIRE(s.facts.size() == 2);
  CHECK(s.facts[0].belief == BeliefInterval(0.95, 1.0));
  CHECK(s.facts[1].belief == BeliefInterval::certain());
  CHECK(s.percepts().size() == 1);
  CHECK(s.context().size() == 1);
  CHECK_THROWS_AS(parse_scene_file("objects: knife\nhasSharpEdge(spoon)\n"), ParseError);
  CHECK_THROWS_AS(parse_scene_file("hasSharpEdge(O)\n"), ParseError);
  CHECK_THROWS_AS(parse_scene_file("p(a)\np(a)\n"), ParseError);
}

TEST_CASE("random rule bases round-trip") {
  Gen g(7001);
  for (int i = 0; i < 1000; ++i) {
    const auto rules = random_rules(g);
    const auto text = serialize_rules(rules);
    CAPTURE(text);
    const auto parsed = parse_rule_file(text);
    REQUIRE(parsed == rules);
    CHECK(serialize_rules(parsed) == text);
  }
}

TEST_CASE("random scenes round-trip") {
  Gen g(7002);
  for (int i = 0; i < 1000; ++i) {
    const auto scene = random_scene(g);
    const auto text = serialize_scene(scene);
    CAPTURE(text);
    const auto parsed = parse_scene_file(text);
    REQUIRE(parsed == scene);
    CHECK(serialize_scene(parsed) == text);
  }
}

TEST_CASE("random cases round-trip") {
  Gen g(7003);
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_case(g, "case" + std::to_string(i));
    const auto text = serialize_case(c);
    CAPTURE(text);
    const auto parsed = parse_case(text);
    REQUIRE(parsed == c);
    CHECK(serialize_case(parsed) == text);
    CHECK(sme::parse_dgroup(sme::serialize(c.dgroup)) == c.dgroup);
  }
}

TEST_CASE("malformed inputs only raise positioned parse errors") {
  Gen g(7004);
  std::size_t rules_rejected = 0, scenes_rejected = 0, cases_rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    expect_clean_failure([](const std::string& t) { parse_rule_file(t); },
                         mutate(g, serialize_rules(random_rules(g))), rules_rejected);
    expect_clean_failure([](const std::string& t) { parse_scene_file(t); },
                         mutate(g, serialize_scene(random_scene(g))), scenes_rejected);
    expect_clean_failure([](const std::string& t) { parse_case(t); },
                         mutate(g, serialize_case(random_case(g, "m"))), cases_rejected);
  }
  // Most edits break something; a silent parser would accept them all.
  CHECK(rules_rejected > 300);
  CHECK(scenes_rejected > 300);
  CHECK(cases_rejected > 500);
}

TEST_CASE("s-expression reader") {
  const auto forms = sexpr::read_all("(a \"b c\" (d)) ; note\n(e)", "t");
  REQUIRE(forms.size() == 2);
  CHECK(forms[0].is_form("a"));
  CHECK(forms[0].items[1].is_string());
  CHECK(forms[0].items[1].text == "b c");
  CHECK(forms[1].pos.line == 2);
  CHECK(sexpr::write(forms[0]) == "(a \"b c\" (d))");
  CHECK_THROWS_AS(sexpr::read_all("(a", "t"), ParseError);
  CHECK_THROWS_AS(sexpr::read_all(")", "t"), ParseError);
  CHECK_THROWS_AS(sexpr::read_all("\"open", "t"), ParseError);
  CHECK_THROWS_AS(sexpr::read_all(std::string(100000, '('), "t"), ParseError);
}

TEST_CASE("dgroup reader and builder invariants") {
  const auto g = sme::parse_dgroup(
      "(dgroup g (entities a (b agent)) (exprs (expr e1 (relation r a b)) (expr e2 (attribute p e1))))");
  CHECK(g.entities.size() == 2);
  CHECK(g.expressions.size() == 2);
  CHECK(g.expressions[1].args[0].kind == sme::ArgRef::Kind::expression);

  CHECK_THROWS_AS(sme::parse_dgroup("(dgroup g (entities a) (expr e1 (relation r a z)))"), ParseError);
  CHECK_THROWS_AS(sme::parse_dgroup("(dgroup g (entities a) (expr e1 (attribute p a a)))"), ParseError);
  CHECK_THROWS_AS(sme::parse_dgroup("(dgroup g (entities a a))"), ParseError);
  CHECK_THROWS_AS(sme::parse_dgroup("(dgroup g (entities a) (expr e1 (relation r a)) (expr e2 (relation r a a)))"),
                  ParseError);
  CHECK_THROWS_AS(sme::DgroupBuilder("g").entity("a").relation("e1", "r", {"nope"}), ModelError);

  sme::DgroupBuilder b("g");
  b.entity("x").entity("y", sme::EntityType::object).relation("e1", "r", {"x", "y"});
  CHECK(b.build().isolated_entities().empty());
  b.entity("z");
  CHECK(b.build().isolated_entities() == std::vector<std::string>{"z"});
}

TEST_CASE("case labels are mandatory and validated") {
  CHECK_THROWS_AS(parse_case("(dgroup a (entities x))"), ParseError);
  CHECK_THROWS_AS(parse_case("(dgroup a (entities x) (label acceptability maybe))"), ParseError);
  CHECK_THROWS_AS(parse_case("(dgroup a (entities x) (label acceptability violation) (provenance rumour))"),
                  ParseError);
  const auto c = parse_case("(dgroup a (entities x) (label acceptability violation))");
  CHECK(c.acceptability == Acceptability::violation);
  CHECK(c.provenance == "experience");
}
