#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maestrob/runtime.hpp"
#include "support.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

const std::string& scratch_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/maestrob-cli-XXXXXX";
    char* p = mkdtemp(tmpl);
    REQUIRE(p != nullptr);
    return std::string(p);
  }();
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& content) {
  std::string path = scratch_dir() + "/" + name;
  std::ofstream f(path);
  f << content;
  REQUIRE(f.good());
  return path;
}

// Runs the installed binary with each argument single-quoted, capturing
// both streams and the exit code.
CliResult run_cli(const std::vector<std::string>& args) {
  std::string out_path = scratch_dir() + "/stdout.txt";
  std::string err_path = scratch_dir() + "/stderr.txt";
  std::string cmd = MAESTROB_BIN;
  for (const std::string& a : args) {
    REQUIRE(a.find('\'') == std::string::npos);
    cmd += " '" + a + "'";
  }
  cmd += " > '" + out_path + "' 2> '" + err_path + "'";
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = testsupport::read_file(out_path);
  r.err = testsupport::read_file(err_path);
  return r;
}

std::string fx(const std::string& rel) { return testsupport::fixture(rel); }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("extract lists scene facts one per line") {
  auto r = run_cli({"extract", "--scene", fx("demo/scene-initial.json"), "--object-db",
                    fx("demo/object-db.json")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "empty(hole1)\n"));
  CHECK(contains(r.out, "on(cyl-peg,table)\n"));

  std::string empty_scene = write_scratch("empty-scene.json", "{\"objects\": []}\n");
  auto r2 = run_cli({"extract", "--scene", empty_scene, "--object-db", fx("demo/object-db.json")});
  CHECK(r2.code == 0);
  CHECK(r2.out.empty());
}

TEST_CASE("extract rejects malformed input with exit 2") {
  std::string bad = write_scratch("bad-scene.json", "not json\n");
  auto r = run_cli({"extract", "--scene", bad, "--object-db", fx("demo/object-db.json")});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "maestrob: "));
}

TEST_CASE("resolve writes an executable pair and reports provenance") {
  std::string dom = scratch_dir() + "/resolved-d.pddl";
  std::string prb = scratch_dir() + "/resolved-p.pddl";
  auto r = run_cli({"resolve", "--domain", fx("demo/domain.pddls"), "--problem",
                    fx("demo/problem.pddls"), "--ontology", fx("demo/ontology.txt"), "--object-db",
                    fx("demo/object-db.json"), "--scene", fx("demo/scene-initial.json"), "--rules",
                    fx("demo/rules.json"), "--out-domain", dom, "--out-problem", prb});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "(insertable cyl-peg hole1) emitted fits-cavity "
                        "[maestrob:kind/cyl-peg maestrob:kind/plate] 0.03 <= 0.0315\n"));
  CHECK(contains(r.out, "(insertable cuboid-peg hole1) omitted"));

  std::string dom_text = testsupport::read_file(dom);
  std::string prb_text = testsupport::read_file(prb);
  CHECK(contains(dom_text, "(define (domain peg-world)"));
  CHECK(contains(prb_text, "(insertable cyl-peg hole1)"));
  CHECK_FALSE(contains(dom_text, ":context"));
  CHECK_FALSE(contains(prb_text, ":context"));

  auto p = run_cli({"plan", "--domain", dom, "--problem", prb});
  CHECK(p.code == 0);
  CHECK(p.out == "0: (pick-n-insert cyl-peg hole1)\n");
}

TEST_CASE("resolve reports a missing property with exit 3") {
  std::string poison = write_scratch(
      "poison-ontology.txt",
      testsupport::read_file(fx("demo/ontology.txt")) +
          "maestrob:kind/cuboid-peg maestrob:prop/cavity-shape \"cylinder\"\n");
  auto r = run_cli({"resolve", "--domain", fx("demo/domain.pddls"), "--problem",
                    fx("demo/problem.pddls"), "--ontology", poison, "--object-db",
                    fx("demo/object-db.json"), "--scene", fx("demo/scene-initial.json"),
                    "--clearance", "0.0005"});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "missing property maestrob:prop/cavity-diameter"));
}

TEST_CASE("resolve passes a plain pair through untouched") {
  std::string dom = write_scratch(
      "flip-d.pddl",
      "(define (domain flipd)\n"
      " (:requirements :strips :typing)\n"
      " (:predicates (p ?x - object) (q ?x - object))\n"
      " (:action flip :parameters (?x - object)\n"
      "  :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))\n");
  std::string prb = write_scratch(
      "flip-sat.pddl",
      "(define (problem flip-sat) (:domain flipd) (:objects a - object)\n"
      " (:init (p a)) (:goal (p a)))\n");
  std::string empty_scene = write_scratch("no-objects.json", "{\"objects\": []}\n");
  auto r = run_cli({"resolve", "--domain", dom, "--problem", prb, "--ontology",
                    fx("demo/ontology.txt"), "--object-db", fx("demo/object-db.json"), "--scene",
                    empty_scene});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "(define (domain flipd)"));
  CHECK(contains(r.out, "(p a)"));
  CHECK_FALSE(contains(r.out, "insertable"));
}

TEST_CASE("plan distinguishes satisfied, solvable, and unsolvable goals") {
  std::string dom = write_scratch(
      "plan-d.pddl",
      "(define (domain flipd)\n"
      " (:requirements :strips :typing)\n"
      " (:predicates (p ?x - object) (q ?x - object))\n"
      " (:action flip :parameters (?x - object)\n"
      "  :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))\n");
  std::string sat = write_scratch(
      "plan-sat.pddl",
      "(define (problem s) (:domain flipd) (:objects a - object)\n"
      " (:init (p a)) (:goal (p a)))\n");
  std::string step = write_scratch(
      "plan-step.pddl",
      "(define (problem s) (:domain flipd) (:objects a - object)\n"
      " (:init (p a)) (:goal (q a)))\n");
  std::string unsat = write_scratch(
      "plan-unsat.pddl",
      "(define (problem s) (:domain flipd) (:objects a - object)\n"
      " (:init (p a)) (:goal (and (p a) (q a))))\n");

  auto r_sat = run_cli({"plan", "--domain", dom, "--problem", sat});
  CHECK(r_sat.code == 0);
  CHECK(r_sat.out.empty());

  auto r_step = run_cli({"plan", "--domain", dom, "--problem", step});
  CHECK(r_step.code == 0);
  CHECK(r_step.out == "0: (flip a)\n");

  auto r_unsat = run_cli({"plan", "--domain", dom, "--problem", unsat});
  CHECK(r_unsat.code == 4);
  CHECK(r_unsat.out.empty());
  CHECK(contains(r_unsat.err, "no plan reaches the goal"));
}

TEST_CASE("ground maps utterances and demo pairs to goals") {
  auto r = run_cli({"ground", "--templates", fx("demo/templates.json"), "--utterance",
                    "please perform the peg assembly task now", "--scene",
                    fx("demo/scene-initial.json"), "--ontology", fx("demo/ontology.txt"),
                    "--object-db", fx("demo/object-db.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "filled(hole1)\n");

  auto r2 = run_cli({"ground", "--demo-initial", fx("demo/scene-initial.json"), "--demo-final",
                     fx("demo/scene-final.json"), "--object-db", fx("demo/object-db.json")});
  CHECK(r2.code == 0);
  CHECK(r2.out == "filled(hole1)\nin(cyl-peg,hole1)\n");

  auto r3 = run_cli({"ground", "--templates", fx("demo/templates.json"), "--utterance",
                     "flarb the wubble", "--scene", fx("demo/scene-initial.json"), "--ontology",
                     fx("demo/ontology.txt"), "--object-db", fx("demo/object-db.json")});
  CHECK(r3.code == 6);
  CHECK(contains(r3.err, "no template matched"));
}

TEST_CASE("run reproduces the frozen execution transcripts") {
  std::vector<std::string> base = {
      "run",        "--object-db", fx("demo/object-db.json"),
      "--scene",    fx("demo/scene-initial.json"),
      "--ontology", fx("demo/ontology.txt"),
      "--domain",   fx("demo/domain.pddls"),
      "--problem",  fx("demo/problem.pddls"),
      "--skills",   fx("demo/skills-ur5.json")};

  SUBCASE("clean run succeeds without replanning") {
    std::string bus = scratch_dir() + "/clean.bus.jsonl";
    auto args = base;
    args.insert(args.end(), {"--bus-log", bus});
    auto r = run_cli(args);
    CHECK(r.code == 0);
    CHECK(r.out == testsupport::read_file(fx("golden/run-clean.trace.txt")));
    CHECK(testsupport::read_file(bus) == testsupport::read_file(fx("golden/run-clean.bus.jsonl")));
  }

  SUBCASE("a vanished peg escalates to a person when no help comes") {
    std::string bus = scratch_dir() + "/missing.bus.jsonl";
    auto args = base;
    args.insert(args.end(),
                {"--failure-script", fx("demo/failure-missing-peg.json"), "--bus-log", bus});
    auto r = run_cli(args);
    CHECK(r.code == 5);
    CHECK(r.out == testsupport::read_file(fx("golden/run-missing-peg.trace.txt")));
    CHECK(testsupport::read_file(bus) ==
          testsupport::read_file(fx("golden/run-missing-peg.bus.jsonl")));
    CHECK(contains(testsupport::read_file(bus), "\"topic\":\"runtime/assistance-request\""));
  }

  SUBCASE("scripted assistance lets the run finish after one replan") {
    std::string bus = scratch_dir() + "/assisted.bus.jsonl";
    auto args = base;
    args.insert(args.end(), {"--failure-script", fx("demo/failure-missing-peg.json"), "--assist",
                             fx("demo/assist-restore-peg.json"), "--bus-log", bus});
    auto r = run_cli(args);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "replans=1"));
    CHECK(r.out == testsupport::read_file(fx("golden/run-assisted.trace.txt")));
    CHECK(testsupport::read_file(bus) ==
          testsupport::read_file(fx("golden/run-assisted.bus.jsonl")));
  }
}

TEST_CASE("skills merge emits the same union the library computes") {
  using namespace maestrob;
  auto r = run_cli({"skills", "merge", "--db", fx("demo/skills-ur5.json"), "--db",
                    fx("demo/skills-pepper.json")});
  CHECK(r.code == 0);
  SkillDb merged = load_skill_db(r.out);
  SkillDb want =
      share_skills(load_skill_db(testsupport::read_file(fx("demo/skills-ur5.json"))),
                   load_skill_db(testsupport::read_file(fx("demo/skills-pepper.json"))));
  CHECK(merged == want);
}

TEST_CASE("doc format is machine readable JSON") {
  using nlohmann::json;
  auto r = run_cli({"extract", "--scene", fx("demo/scene-final.json"), "--object-db",
                    fx("demo/object-db.json"), "--format", "doc"});
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  REQUIRE(doc.contains("facts"));
  bool found = false;
  for (const auto& f : doc["facts"])
    if (f.get<std::string>() == "filled(hole1)") found = true;
  CHECK(found);

  std::string dom = scratch_dir() + "/doc-d.pddl";
  std::string prb = scratch_dir() + "/doc-p.pddl";
  auto rr = run_cli({"resolve", "--domain", fx("demo/domain.pddls"), "--problem",
                     fx("demo/problem.pddls"), "--ontology", fx("demo/ontology.txt"), "--object-db",
                     fx("demo/object-db.json"), "--scene", fx("demo/scene-initial.json"),
                     "--rules", fx("demo/rules.json"), "--out-domain", dom, "--out-problem", prb});
  REQUIRE(rr.code == 0);
  auto p = run_cli({"plan", "--domain", dom, "--problem", prb, "--format", "doc"});
  CHECK(p.code == 0);
  json pd = json::parse(p.out);
  REQUIRE(pd.contains("steps"));
  CHECK(pd["steps"].size() == 1);
  CHECK(pd["steps"][0].get<std::string>() == "(pick-n-insert cyl-peg hole1)");
  CHECK(pd["expanded"].is_number());
}

TEST_CASE("usage mistakes exit 2 with a hint on stderr") {
  auto r = run_cli({"extract"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());

  auto r2 = run_cli({"resolve", "--domain", "x", "--problem", "y", "--ontology", "z",
                     "--object-db", "w", "--scene", "v", "--rules", "r", "--clearance", "0.1"});
  CHECK(r2.code == 2);
  CHECK(contains(r2.err, "excludes"));

  auto r3 = run_cli({"ground", "--utterance", "do it", "--object-db", fx("demo/object-db.json")});
  CHECK(r3.code == 2);

  auto r4 = run_cli({"frobnicate"});
  CHECK(r4.code == 2);
}
