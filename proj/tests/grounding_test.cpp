#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "maestrob/errors.hpp"
#include "maestrob/grounding.hpp"
#include "maestrob/ontology.hpp"
#include "maestrob/pddl/parser.hpp"
#include "maestrob/pddl/printer.hpp"
#include "maestrob/planner.hpp"
#include "maestrob/resolver.hpp"
#include "maestrob/scene/scene.hpp"
#include "support.hpp"

using namespace maestrob;

namespace {

std::vector<scene::ObjectKind> demo_kinds() {
  return scene::load_object_db(testsupport::read_file(testsupport::fixture("demo/object-db.json")));
}

Ontology demo_ontology() {
  return Ontology::load(testsupport::read_file(testsupport::fixture("demo/ontology.txt")) +
                        scene::property_triples(demo_kinds()));
}

scene::SceneState demo_scene(const char* file) {
  auto kinds = demo_kinds();
  auto instances = scene::load_scene(testsupport::read_file(testsupport::fixture(file)));
  return scene::extract_state(instances, kinds, scene::RelationParams{});
}

std::vector<GoalTemplate> demo_templates() {
  return load_templates(testsupport::read_file(testsupport::fixture("demo/templates.json")));
}

Fact F(const char* pred, std::initializer_list<const char*> args) {
  Fact f;
  f.predicate = Symbol(pred);
  for (const char* a : args) f.args.emplace_back(Symbol(a));
  return f;
}

// Score of one template recomputed outside match(): best phrase Jaccard
// with that template's slot names dropped from the phrase side.
double oracle_score(const GoalTemplate& t, const std::string& utterance) {
  std::set<std::string> slot_names;
  for (const auto& [slot, uri] : t.slots) slot_names.insert(slot);
  auto utter = tokenize(utterance);
  double best = 0.0;
  for (const std::string& phrase : t.phrases) {
    std::vector<std::string> pt;
    for (const std::string& tok : tokenize(phrase))
      if (!slot_names.count(tok)) pt.push_back(tok);
    best = std::max(best, jaccard(pt, utter));
  }
  return best;
}

struct ParaphraseCase {
  const char* utterance;
  const char* winner;
  int num;  // expected score as an exact fraction
  int den;
};

// Token-set arithmetic for these was done by hand; the fractions pin the
// scoring rule, not just the ranking.
const std::vector<ParaphraseCase>& paraphrases() {
  static const std::vector<ParaphraseCase> cases = {
      {"please perform the peg assembly task now", "peg-assembly", 5, 7},
      {"do the peg assembly now", "peg-assembly", 4, 5},
      {"assemble the peg please", "peg-assembly", 3, 4},
      {"put the peg into the hole now", "peg-assembly", 5, 6},
      {"clear the hole please", "clear-hole", 3, 4},
      {"remove the peg", "clear-hole", 3, 4},
      {"make the hole empty please", "clear-hole", 4, 5},
      {"insert the cylindrical peg now", "insert-cylinder", 4, 5},
      {"slide the cylinder into the plate now", "insert-cylinder", 5, 6},
      {"stop the robot now", "halt", 3, 4},
  };
  return cases;
}

}  // namespace

TEST_CASE("tokenizer lowercases and splits on non-alphanumerics") {
  CHECK(tokenize("Perform; the PEG assembly, task!") ==
        std::vector<std::string>{"perform", "the", "peg", "assembly", "task"});
  CHECK(tokenize("put ?h on-top_of table2") ==
        std::vector<std::string>{"put", "h", "on", "top", "of", "table2"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("  \t\n ") == std::vector<std::string>{});
  CHECK(tokenize("a  a a") == std::vector<std::string>{"a", "a", "a"});
}

TEST_CASE("jaccard treats token lists as sets") {
  CHECK(jaccard({"a", "b"}, {"b", "a"}) == 1.0);
  CHECK(jaccard({"a", "a", "b"}, {"a", "b", "b"}) == 1.0);
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == 1.0 / 3.0);
  CHECK(jaccard({"a"}, {"b"}) == 0.0);
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard({}, {"a"}) == 0.0);
}

TEST_CASE("template file loads with parsed goals and slot restrictions") {
  auto templates = demo_templates();
  REQUIRE(templates.size() == 4);
  CHECK(templates[0].id.str() == "peg-assembly");
  CHECK(templates[0].phrases.size() == 4);
  REQUIRE(templates[0].goal.size() == 1);
  CHECK(templates[0].goal[0].positive);
  CHECK(templates[0].goal[0].atom.predicate.str() == "filled");
  REQUIRE(templates[0].goal[0].atom.args.size() == 1);
  CHECK(templates[0].goal[0].atom.args[0].kind == pddl::Term::Kind::Variable);
  CHECK(templates[0].goal[0].atom.args[0].name == "h");
  CHECK(templates[0].slots.at("h") == "maestrob:class/hole-plate");

  CHECK(templates[2].id.str() == "insert-cylinder");
  CHECK(templates[2].goal.size() == 2);
  CHECK(templates[2].slots.size() == 2);
  CHECK(templates[3].slots.empty());
  REQUIRE(templates[3].goal.size() == 1);
  CHECK(templates[3].goal[0].atom.args[0].kind == pddl::Term::Kind::Constant);
}

TEST_CASE("template file rejections") {
  CHECK_THROWS_AS(load_templates("not json"), ParseError);
  CHECK_THROWS_AS(load_templates("[]"), ParseError);
  CHECK_THROWS_AS(load_templates("{}"), ParseError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [42]})"), ParseError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [{"id": "bad id", "phrases": ["x"],
                                     "goal": []}]})"),
                  ValidationError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [{"id": "t", "phrases": [],
                                     "goal": []}]})"),
                  ValidationError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [{"id": "t", "phrases": ["x"]}]})"),
                  ParseError);
  CHECK_THROWS_WITH_AS(load_templates(R"js({"templates": [{"id": "t", "phrases": ["x"],
                                     "goal": ["(filled ?h)"]}]})js"),
                       doctest::Contains("?h"), ValidationError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [{"id": "t", "phrases": ["x"],
                                     "goal": ["filled ?h"], "slots": {"?h": "a:b"}}]})"),
                  SyntaxError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [{"id": "t", "phrases": ["x"],
                                     "goal": [], "slots": {"h": "a:b"}}]})"),
                  ValidationError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [{"id": "t", "phrases": ["x"],
                                     "goal": [], "slots": {"?h": "nocolon"}}]})"),
                  ValidationError);
  CHECK_THROWS_AS(load_templates(R"({"templates": [
                                     {"id": "t", "phrases": ["x"], "goal": []},
                                     {"id": "t", "phrases": ["y"], "goal": []}]})"),
                  ValidationError);
}

TEST_CASE("identical phrase scores exactly one and grounds the goal") {
  auto templates = demo_templates();
  auto scene = demo_scene("demo/scene-initial.json");
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  GroundedGoal g = match("perform the peg assembly task", templates, scene, kinds, onto);
  CHECK(g.template_id.str() == "peg-assembly");
  CHECK(g.score == 1.0);
  REQUIRE(g.bindings.size() == 1);
  CHECK(g.bindings.at("h").str() == "hole1");
  REQUIRE(g.goal.size() == 1);
  CHECK(g.goal[0].positive);
  CHECK(g.goal[0].fact == F("filled", {"hole1"}));

  // the wildcarded phrase also reaches 1.0 once its slot token is dropped
  GroundedGoal w = match("remove the peg from", templates, scene, kinds, onto);
  CHECK(w.template_id.str() == "clear-hole");
  CHECK(w.score == 1.0);
  CHECK(w.goal[0].fact == F("empty", {"hole1"}));
}

TEST_CASE("ten paraphrases pick the right template with pinned scores") {
  auto templates = demo_templates();
  auto scene = demo_scene("demo/scene-initial.json");
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  int correct = 0;
  for (const ParaphraseCase& pc : paraphrases()) {
    CAPTURE(pc.utterance);
    GroundedGoal g = match(pc.utterance, templates, scene, kinds, onto);
    CHECK(g.template_id.str() == pc.winner);
    CHECK(g.score == static_cast<double>(pc.num) / static_cast<double>(pc.den));
    if (g.template_id.str() == pc.winner) ++correct;

    // every competing template scores strictly lower
    for (const GoalTemplate& t : templates) {
      if (t.id == g.template_id) {
        CHECK(oracle_score(t, pc.utterance) == g.score);
      } else {
        CHECK(oracle_score(t, pc.utterance) < g.score);
      }
    }
  }
  CHECK(correct == 10);
}

TEST_CASE("matching is deterministic and order-independent") {
  auto templates = demo_templates();
  auto scene = demo_scene("demo/scene-initial.json");
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  auto reversed = templates;
  std::reverse(reversed.begin(), reversed.end());
  for (const ParaphraseCase& pc : paraphrases()) {
    GroundedGoal a = match(pc.utterance, templates, scene, kinds, onto);
    GroundedGoal b = match(pc.utterance, templates, scene, kinds, onto);
    GroundedGoal c = match(pc.utterance, reversed, scene, kinds, onto);
    CHECK(a.template_id == b.template_id);
    CHECK(a.score == b.score);
    CHECK(a.bindings == b.bindings);
    CHECK(a.template_id == c.template_id);
    CHECK(a.score == c.score);
    CHECK(a.bindings == c.bindings);
  }
}

TEST_CASE("raising the threshold never changes the winner, only cuts off") {
  auto templates = demo_templates();
  auto scene = demo_scene("demo/scene-initial.json");
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  for (const ParaphraseCase& pc : paraphrases()) {
    CAPTURE(pc.utterance);
    GroundedGoal low = match(pc.utterance, templates, scene, kinds, onto, 0.1);
    GroundedGoal at = match(pc.utterance, templates, scene, kinds, onto, low.score);
    CHECK(low.template_id == at.template_id);
    CHECK(low.score == at.score);

    double above = std::nextafter(low.score, 2.0);
    try {
      match(pc.utterance, templates, scene, kinds, onto, above);
      FAIL("expected NoMatchError at tau just above the best score");
    } catch (const NoMatchError& e) {
      CHECK(e.best_score == low.score);
    }
  }
}

TEST_CASE("no template above threshold reports the best score seen") {
  auto templates = demo_templates();
  auto scene = demo_scene("demo/scene-initial.json");
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  try {
    match("fold the laundry", templates, scene, kinds, onto);
    FAIL("expected NoMatchError");
  } catch (const NoMatchError& e) {
    CHECK(e.best_score == 1.0 / 5.0);  // {the} against a three-token phrase
  }

  try {
    match("qwerty zxcvb", templates, scene, kinds, onto);
    FAIL("expected NoMatchError");
  } catch (const NoMatchError& e) {
    CHECK(e.best_score == 0.0);
  }

  CHECK_THROWS_AS(match("anything", {}, scene, kinds, onto), NoMatchError);
}

TEST_CASE("a float-equal tie at the top is ambiguous") {
  auto templates = demo_templates();
  auto scene = demo_scene("demo/scene-initial.json");
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  // {put,the,peg} scores 3/5 against both "put the peg into the hole"
  // (peg-assembly) and "put the round peg in" (insert-cylinder).
  try {
    match("put the peg", templates, scene, kinds, onto);
    FAIL("expected AmbiguousMatchError");
  } catch (const AmbiguousMatchError& e) {
    CHECK(e.tied == std::vector<std::string>{"peg-assembly", "insert-cylinder"});
  }

  // minimal synthetic tie: equidistant single-token utterance
  std::vector<GoalTemplate> pair(2);
  pair[0].id = Symbol("red-blue");
  pair[0].phrases = {"red blue"};
  pair[1].id = Symbol("red-green");
  pair[1].phrases = {"red green"};
  try {
    match("red", pair, scene, kinds, onto);
    FAIL("expected AmbiguousMatchError");
  } catch (const AmbiguousMatchError& e) {
    CHECK(e.tied == std::vector<std::string>{"red-blue", "red-green"});
  }
}

TEST_CASE("slot binding goes through the ontology") {
  auto templates = demo_templates();
  auto kinds = demo_kinds();
  auto onto = demo_ontology();

  SUBCASE("alias restriction picks out the cylindrical peg") {
    auto scene = demo_scene("demo/scene-initial.json");
    GroundedGoal g = match("insert the cylindrical peg", templates, scene, kinds, onto);
    CHECK(g.template_id.str() == "insert-cylinder");
    CHECK(g.bindings.at("p").str() == "cyl-peg");
    CHECK(g.bindings.at("h").str() == "hole1");
    REQUIRE(g.goal.size() == 2);
    CHECK(g.goal[0].fact == F("in", {"cyl-peg", "hole1"}));
    CHECK(g.goal[1].fact == F("filled", {"hole1"}));
  }

  SUBCASE("two holes make the hole slot ambiguous") {
    auto scene = demo_scene("demo/two-holes-scene.json");
    try {
      match("perform the peg assembly task", templates, scene, kinds, demo_ontology());
      FAIL("expected AmbiguousBindingError");
    } catch (const AmbiguousBindingError& e) {
      CHECK(e.slot == "?h");
      CHECK(e.candidates == std::vector<std::string>{"hole1", "hole2"});
    }
  }

  SUBCASE("a class with several members is ambiguous") {
    auto scene = demo_scene("demo/scene-initial.json");
    std::vector<GoalTemplate> t(1);
    t[0].id = Symbol("grab");
    t[0].phrases = {"grab a peg"};
    t[0].goal = {};
    t[0].slots = {{"p", "maestrob:class/peg"}};
    try {
      match("grab a peg", t, scene, kinds, onto);
      FAIL("expected AmbiguousBindingError");
    } catch (const AmbiguousBindingError& e) {
      CHECK(e.slot == "?p");
      CHECK(e.candidates == std::vector<std::string>{"cuboid-peg", "cyl-peg"});
    }
  }

  SUBCASE("a restriction nothing satisfies reports zero candidates") {
    auto scene = demo_scene("demo/scene-initial.json");
    std::vector<GoalTemplate> t(1);
    t[0].id = Symbol("fetch");
    t[0].phrases = {"fetch the gripper"};
    t[0].goal = {};
    t[0].slots = {{"x", "maestrob:class/gripper"}};
    try {
      match("fetch the gripper", t, scene, kinds, onto);
      FAIL("expected AmbiguousBindingError");
    } catch (const AmbiguousBindingError& e) {
      CHECK(e.slot == "?x");
      CHECK(e.candidates.empty());
    }
  }

  SUBCASE("an instance with an undeclared kind is rejected") {
    scene::SceneState s;
    s.instances.push_back({Symbol("ghost"), Symbol("phantom"), {}});
    CHECK_THROWS_AS(match("perform the peg assembly task", templates, s, kinds, onto),
                    UnknownKindError);
  }
}

TEST_CASE("demonstration diff yields the achieved facts as a goal") {
  auto initial = demo_scene("demo/scene-initial.json");
  auto final_frame = demo_scene("demo/scene-final.json");

  auto goal = goal_from_demo(initial, final_frame);
  REQUIRE(goal.size() == 2);
  CHECK(goal[0].positive);
  CHECK(goal[0].fact == F("filled", {"hole1"}));
  CHECK(goal[1].positive);
  CHECK(goal[1].fact == F("in", {"cyl-peg", "hole1"}));

  // every inferred literal holds in the final frame
  for (const pddl::GroundLiteral& l : goal) {
    CHECK(std::binary_search(final_frame.facts.begin(), final_frame.facts.end(), l.fact));
  }

  CHECK_THROWS_AS(goal_from_demo(initial, initial), EmptyDemoDiffError);
  CHECK_THROWS_AS(goal_from_demo(final_frame, final_frame), EmptyDemoDiffError);
}

TEST_CASE("demo goal drives the planner end to end") {
  auto kinds = demo_kinds();
  auto onto = demo_ontology();
  auto initial = demo_scene("demo/scene-initial.json");
  auto final_frame = demo_scene("demo/scene-final.json");
  auto domain = pddl::parse_domain(
      testsupport::read_file(testsupport::fixture("demo/domain.pddls")));

  pddl::Problem problem = synthesize_problem(Symbol("demo-task"), domain, initial.instances,
                                             kinds, onto, goal_from_demo(initial, final_frame));
  ResolvedPair rp =
      resolve(domain, problem, onto, initial, {builtin_insertable_rule()});
  auto actions = ground(rp.domain, rp.problem);
  auto plan_result = plan(rp.problem.init, rp.problem.goal, actions);
  REQUIRE(plan_result.has_value());
  CHECK(plan_to_string(plan_result->steps) == "0: (pick-n-insert cyl-peg hole1)\n");
}
