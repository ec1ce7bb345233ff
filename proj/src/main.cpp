// Command-line surface: one subcommand per pipeline stage, `run` composing
// them over the blackboard. Results go to standard output, diagnostics to
// standard error, and failures map onto a fixed exit-code taxonomy:
//   0 success (including a run that replanned and then succeeded)
//   2 unreadable or malformed input
//   3 semantic gap (unknown symbol, uncovered predicate, missing property,
//     inheritance ambiguity, skill conflict, unbound schema)
//   4 planning failed (no plan exists, or a search bound was hit)
//   5 run ended waiting on human assistance
//   6 language grounding failed (no match, tie, bad slot binding)
//   1 anything else (internal fault)
#include <cstdint>
#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maestrob/blackboard.hpp"
#include "maestrob/errors.hpp"
#include "maestrob/grounding.hpp"
#include "maestrob/ontology.hpp"
#include "maestrob/pddl/parser.hpp"
#include "maestrob/pddl/printer.hpp"
#include "maestrob/planner.hpp"
#include "maestrob/resolver.hpp"
#include "maestrob/runtime.hpp"
#include "maestrob/scene/scene.hpp"

namespace {

using namespace maestrob;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path + "'");
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string literal_str(const pddl::GroundLiteral& l) {
  return l.positive ? l.fact.str() : "not " + l.fact.str();
}

std::vector<std::string> goal_strings(const std::vector<pddl::GroundLiteral>& goal) {
  std::vector<std::string> out;
  for (const pddl::GroundLiteral& l : goal) out.push_back(literal_str(l));
  return out;
}

// Option bundles shared by several subcommands.

struct MarginFlags {
  scene::RelationParams params;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eps-z", params.eps_z, "Vertical contact tolerance for `on` (m)");
    cmd->add_option("--delta", params.delta, "Minimum axis offset for lateral relations (m)");
    cmd->add_option("--lateral", params.lateral, "Cross-axis gate for lateral relations (m)");
    cmd->add_option("--min-overlap", params.min_overlap, "Footprint overlap fraction for `on`");
  }
};

struct PlannerFlags {
  PlanLimits limits;
  std::string search = "breadth";

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-nodes", limits.max_nodes, "Expansion budget for the search");
    cmd->add_option("--max-seconds", limits.max_seconds, "Time budget for the search (s)");
    cmd->add_option("--search", search, "Search strategy")
        ->check(CLI::IsMember({"breadth", "greedy"}));
  }

  SearchMode mode() const {
    return search == "greedy" ? SearchMode::GreedyGoalCount : SearchMode::Breadth;
  }
};

struct RuleFlags {
  std::string rules_file;
  double clearance = 0.0005;

  void attach(CLI::App* cmd) {
    auto* rules_opt = cmd->add_option("--rules", rules_file, "Constraint rule file (JSON)");
    cmd->add_option("--clearance", clearance,
                    "Fit clearance for the built-in insertable rule (m)")
        ->excludes(rules_opt);
  }

  std::vector<ConstraintRule> rules() const {
    if (!rules_file.empty()) return load_rules(slurp(rules_file));
    ConstraintRule r = builtin_insertable_rule();
    r.clearance = clearance;
    return {r};
  }
};

std::vector<scene::ObjectKind> load_kinds(const std::string& path) {
  return scene::load_object_db(slurp(path));
}

// The reasoning store is always the ontology file plus the object
// dimensions, so rule guards can read sizes the same way as class facts.
Ontology load_ontology(const std::string& path, const std::vector<scene::ObjectKind>& kinds) {
  return Ontology::load(slurp(path) + scene::property_triples(kinds));
}

void emit(const std::string& format, const json& doc, const std::string& lines) {
  if (format == "doc")
    std::cout << doc.dump() << "\n";
  else
    std::cout << lines;
}

std::string terminal_name(Terminal::Kind kind) {
  switch (kind) {
    case Terminal::Kind::Succeeded: return "succeeded";
    case Terminal::Kind::ReplannedThenSucceeded: return "replanned-then-succeeded";
    case Terminal::Kind::AssistanceRequested: break;
  }
  return "assistance-requested";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale task planning pipeline: scene facts, semantic resolution,\n"
               "search, language grounding, and a simulated execute-replan loop."};
  app.require_subcommand(1);

  std::string format = "lines";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"lines", "doc"}))
      ->capture_default_str();

  int rc = 0;

  // --- extract ------------------------------------------------------------
  auto* extract = app.add_subcommand("extract", "Print the symbolic facts of a scene");
  extract->fallthrough();
  struct {
    std::string scene, object_db;
    MarginFlags margins;
  } ex;
  extract->add_option("--scene", ex.scene, "Scene file (JSON)")->required();
  extract->add_option("--object-db", ex.object_db, "Object kind database (JSON)")->required();
  ex.margins.attach(extract);
  extract->callback([&] {
    auto kinds = load_kinds(ex.object_db);
    auto state = scene::extract_state(scene::load_scene(slurp(ex.scene)), kinds, ex.margins.params);
    std::string lines;
    json facts = json::array();
    for (const Fact& f : state.facts) {
      lines += f.str() + "\n";
      facts.push_back(f.str());
    }
    emit(format, json{{"facts", facts}}, lines);
  });

  // --- resolve ------------------------------------------------------------
  auto* resolve_cmd =
      app.add_subcommand("resolve", "Compile an annotated pair into runnable planning files");
  resolve_cmd->fallthrough();
  struct {
    std::string domain, problem, ontology, object_db, scene;
    std::string out_domain, out_problem;
    MarginFlags margins;
    RuleFlags rules;
  } rs;
  resolve_cmd->add_option("--domain", rs.domain, "Annotated domain file")->required();
  resolve_cmd->add_option("--problem", rs.problem, "Annotated problem file")->required();
  resolve_cmd->add_option("--ontology", rs.ontology, "Ontology triple file")->required();
  resolve_cmd->add_option("--object-db", rs.object_db, "Object kind database (JSON)")->required();
  resolve_cmd->add_option("--scene", rs.scene, "Scene file (JSON)")->required();
  auto* out_d = resolve_cmd->add_option("--out-domain", rs.out_domain, "Write the domain here");
  auto* out_p = resolve_cmd->add_option("--out-problem", rs.out_problem, "Write the problem here");
  out_d->needs(out_p);
  out_p->needs(out_d);
  rs.margins.attach(resolve_cmd);
  rs.rules.attach(resolve_cmd);
  resolve_cmd->callback([&] {
    auto kinds = load_kinds(rs.object_db);
    Ontology ontology = load_ontology(rs.ontology, kinds);
    auto state =
        scene::extract_state(scene::load_scene(slurp(rs.scene)), kinds, rs.margins.params);
    ResolvedPair rp = resolve(pddl::parse_domain(slurp(rs.domain)),
                              pddl::parse_problem(slurp(rs.problem)), ontology, state,
                              rs.rules.rules());
    std::string domain_text = pddl::print_domain(rp.domain);
    std::string problem_text = pddl::print_problem(rp.problem);
    std::string report = provenance_report(rp.provenance);
    bool to_files = !rs.out_domain.empty();
    if (to_files) {
      spill(rs.out_domain, domain_text);
      spill(rs.out_problem, problem_text);
    }
    json derived = json::array();
    for (const Fact& f : rp.derived) derived.push_back(f.str());
    json doc{{"derived", derived},
             {"domain", domain_text},
             {"problem", problem_text},
             {"provenance", split_lines(report)}};
    emit(format, doc, to_files ? report : domain_text + problem_text + report);
  });

  // --- plan ---------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "Search a resolved pair for a shortest plan");
  plan_cmd->fallthrough();
  struct {
    std::string domain, problem;
    PlannerFlags planner;
  } pl;
  plan_cmd->add_option("--domain", pl.domain, "Resolved domain file")->required();
  plan_cmd->add_option("--problem", pl.problem, "Resolved problem file")->required();
  pl.planner.attach(plan_cmd);
  plan_cmd->callback([&] {
    pddl::Domain domain = pddl::parse_domain(slurp(pl.domain));
    pddl::Problem problem = pddl::parse_problem(slurp(pl.problem));
    auto actions = ground(domain, problem);
    auto result = plan(problem.init, problem.goal, actions, pl.planner.limits, pl.planner.mode());
    if (!result) {
      std::cerr << "maestrob: no plan reaches the goal\n";
      rc = 4;
      return;
    }
    json steps = json::array();
    for (const GroundAction& a : result->steps) steps.push_back(a.str());
    emit(format, json{{"expanded", result->stats.expanded}, {"steps", steps}},
         plan_to_string(result->steps));
  });

  // --- ground -------------------------------------------------------------
  auto* ground_cmd =
      app.add_subcommand("ground", "Turn an utterance or a demonstration into a goal");
  ground_cmd->fallthrough();
  struct {
    std::string templates, utterance, demo_initial, demo_final;
    std::string scene, object_db, ontology;
    double tau = 0.5;
    MarginFlags margins;
  } gr;
  auto* g_templates =
      ground_cmd->add_option("--templates", gr.templates, "Goal template file (JSON)");
  auto* g_utt = ground_cmd->add_option("--utterance", gr.utterance, "Natural-language command");
  auto* g_di = ground_cmd->add_option("--demo-initial", gr.demo_initial, "First key frame");
  auto* g_df = ground_cmd->add_option("--demo-final", gr.demo_final, "Second key frame");
  g_utt->needs(g_templates);
  g_templates->needs(g_utt);
  g_di->needs(g_df);
  g_df->needs(g_di);
  g_utt->excludes(g_di);
  auto* g_scene = ground_cmd->add_option("--scene", gr.scene, "Scene file for slot binding");
  auto* g_ont = ground_cmd->add_option("--ontology", gr.ontology, "Ontology triple file");
  g_utt->needs(g_scene);
  g_utt->needs(g_ont);
  ground_cmd->add_option("--object-db", gr.object_db, "Object kind database (JSON)")->required();
  ground_cmd->add_option("--tau", gr.tau, "Match acceptance threshold")->capture_default_str();
  gr.margins.attach(ground_cmd);
  ground_cmd->callback([&] {
    auto kinds = load_kinds(gr.object_db);
    if (!gr.templates.empty()) {
      Ontology ontology = load_ontology(gr.ontology, kinds);
      auto state =
          scene::extract_state(scene::load_scene(slurp(gr.scene)), kinds, gr.margins.params);
      GroundedGoal g = match(gr.utterance, load_templates(slurp(gr.templates)), state, kinds,
                             ontology, gr.tau);
      std::string lines;
      for (const pddl::GroundLiteral& l : g.goal) lines += literal_str(l) + "\n";
      json bindings = json::object();
      for (const auto& [slot, id] : g.bindings) bindings[slot] = id.str();
      emit(format,
           json{{"bindings", bindings},
                {"goal", goal_strings(g.goal)},
                {"score", g.score},
                {"template", g.template_id.str()}},
           lines);
    } else if (!gr.demo_initial.empty()) {
      auto first =
          scene::extract_state(scene::load_scene(slurp(gr.demo_initial)), kinds, gr.margins.params);
      auto second =
          scene::extract_state(scene::load_scene(slurp(gr.demo_final)), kinds, gr.margins.params);
      auto goal = goal_from_demo(first, second);
      std::string lines;
      for (const pddl::GroundLiteral& l : goal) lines += literal_str(l) + "\n";
      emit(format, json{{"goal", goal_strings(goal)}}, lines);
    } else {
      throw ValidationError("give --utterance with --templates, or a demo frame pair");
    }
  });

  // --- run ----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Execute a goal in the simulated world");
  run_cmd->fallthrough();
  struct {
    std::string object_db, scene, ontology, domain;
    std::string problem, templates, utterance, demo_initial, demo_final;
    std::vector<std::string> skills;
    std::string failure_script, assist, bus_log;
    double tau = 0.5, transient_p = 0.0;
    std::uint64_t seed = 0;
    int max_replans = 5;
    MarginFlags margins;
    RuleFlags rules;
    PlannerFlags planner;
  } rn;
  run_cmd->add_option("--object-db", rn.object_db, "Object kind database (JSON)")->required();
  run_cmd->add_option("--scene", rn.scene, "Initial world scene (JSON)")->required();
  run_cmd->add_option("--ontology", rn.ontology, "Ontology triple file")->required();
  run_cmd->add_option("--domain", rn.domain, "Annotated domain file")->required();
  auto* r_problem = run_cmd->add_option("--problem", rn.problem, "Annotated problem file");
  auto* r_templates = run_cmd->add_option("--templates", rn.templates, "Goal template file");
  auto* r_utt = run_cmd->add_option("--utterance", rn.utterance, "Natural-language command");
  auto* r_di = run_cmd->add_option("--demo-initial", rn.demo_initial, "First demo key frame");
  auto* r_df = run_cmd->add_option("--demo-final", rn.demo_final, "Second demo key frame");
  r_utt->needs(r_templates);
  r_templates->needs(r_utt);
  r_di->needs(r_df);
  r_df->needs(r_di);
  r_problem->excludes(r_utt)->excludes(r_di);
  r_utt->excludes(r_di);
  run_cmd->add_option("--skills", rn.skills, "Skill database (repeat to share)")
      ->required()
      ->take_all();
  run_cmd->add_option("--failure-script", rn.failure_script, "Scripted execution faults (JSON)");
  run_cmd->add_option("--assist", rn.assist, "Scripted human assistance responses (JSON)");
  run_cmd->add_option("--bus-log", rn.bus_log, "Export every bus message here (JSON lines)");
  run_cmd->add_option("--tau", rn.tau, "Match acceptance threshold")->capture_default_str();
  run_cmd->add_option("--transient-p", rn.transient_p, "Per-step transient fault probability");
  run_cmd->add_option("--seed", rn.seed, "Simulation random seed")->capture_default_str();
  run_cmd->add_option("--max-replans", rn.max_replans, "Failures tolerated before escalating")
      ->capture_default_str();
  rn.margins.attach(run_cmd);
  rn.rules.attach(run_cmd);
  rn.planner.attach(run_cmd);
  run_cmd->callback([&] {
    if (rn.problem.empty() && rn.utterance.empty() && rn.demo_initial.empty())
      throw ValidationError(
          "give exactly one goal source: --problem, --utterance with --templates, "
          "or --demo-initial with --demo-final");
    auto kinds = load_kinds(rn.object_db);
    Ontology ontology = load_ontology(rn.ontology, kinds);
    auto instances = scene::load_scene(slurp(rn.scene));
    pddl::Domain domain = pddl::parse_domain(slurp(rn.domain));

    SkillDb skills = load_skill_db(slurp(rn.skills[0]));
    for (size_t i = 1; i < rn.skills.size(); ++i)
      skills = share_skills(load_skill_db(slurp(rn.skills[i])), skills);

    SimWorld world(instances, kinds, rn.margins.params, SimWorld::default_gestures(), rn.seed);
    if (!rn.failure_script.empty())
      world.set_failure_script(load_failure_script(slurp(rn.failure_script)));
    if (rn.transient_p > 0) world.set_transient_failure_probability(rn.transient_p);

    std::ofstream bus_log;
    Blackboard bus;
    if (!rn.bus_log.empty()) {
      bus_log.open(rn.bus_log, std::ios::binary);
      if (!bus_log) throw Error("cannot write '" + rn.bus_log + "'");
      bus.bridge_export("*", bus_log);
    }

    // Scripted stand-in for the person on the floor: answer each
    // assistance request with the next queued response.
    std::deque<json> responses;
    if (!rn.assist.empty()) {
      json doc = json::parse(slurp(rn.assist), nullptr, false);
      if (doc.is_discarded() || !doc.is_object() || !doc.contains("responses") ||
          !doc["responses"].is_array())
        throw ParseError(0, "assist files are {\"responses\": [...]} documents");
      for (const json& r : doc["responses"]) responses.push_back(r);
    }
    bus.subscribe("runtime/assistance-request", [&](const Message&) {
      if (responses.empty()) return;
      json payload = responses.front();
      responses.pop_front();
      bus.publish("human/assistance-response", payload, "human");
    });

    pddl::Problem problem;
    if (!rn.problem.empty()) {
      problem = pddl::parse_problem(slurp(rn.problem));
    } else if (!rn.utterance.empty()) {
      auto state = scene::extract_state(instances, kinds, rn.margins.params);
      GroundedGoal g = match(rn.utterance, load_templates(slurp(rn.templates)), state, kinds,
                             ontology, rn.tau);
      json bindings = json::object();
      for (const auto& [slot, id] : g.bindings) bindings[slot] = id.str();
      bus.publish("grounding/goal",
                  json{{"bindings", bindings},
                       {"goal", goal_strings(g.goal)},
                       {"score", g.score},
                       {"template", g.template_id.str()}},
                  "grounding");
      problem = synthesize_problem(Symbol("task"), domain, instances, kinds, ontology, g.goal);
    } else {
      auto first = scene::extract_state(scene::load_scene(slurp(rn.demo_initial)), kinds,
                                        rn.margins.params);
      auto second = scene::extract_state(scene::load_scene(slurp(rn.demo_final)), kinds,
                                         rn.margins.params);
      auto goal = goal_from_demo(first, second);
      bus.publish("grounding/goal", json{{"goal", goal_strings(goal)}}, "grounding");
      problem = synthesize_problem(Symbol("task"), domain, instances, kinds, ontology,
                                   std::move(goal));
    }

    ReplanPolicy policy;
    policy.max_replans = rn.max_replans;
    policy.limits = rn.planner.limits;
    policy.mode = rn.planner.mode();
    ExecutionTrace trace =
        run_plan(domain, problem, ontology, rn.rules.rules(), skills, world, bus, policy);

    json events = json::array();
    for (const TraceEvent& e : trace.events)
      events.push_back(json{{"digest", e.digest},
                            {"note", e.note},
                            {"skill", e.skill.str()},
                            {"step", e.step},
                            {"success", e.success},
                            {"timestamp", e.timestamp}});
    std::string lines = trace_to_string(trace);
    lines += "terminal: " + terminal_name(trace.terminal.kind) +
             " replans=" + std::to_string(trace.terminal.replans);
    if (!trace.terminal.reason.empty()) lines += " reason=" + trace.terminal.reason;
    lines += "\n";
    emit(format,
         json{{"events", events},
              {"terminal",
               json{{"kind", terminal_name(trace.terminal.kind)},
                    {"replans", trace.terminal.replans},
                    {"reason", trace.terminal.reason}}}},
         lines);
    if (trace.terminal.kind == Terminal::Kind::AssistanceRequested) rc = 5;
  });

  // --- skills -------------------------------------------------------------
  auto* skills_cmd = app.add_subcommand("skills", "Skill database utilities");
  skills_cmd->require_subcommand(1);
  auto* merge_cmd = skills_cmd->add_subcommand("merge", "Merge databases, name-keyed");
  merge_cmd->fallthrough();
  struct {
    std::vector<std::string> dbs;
    std::string out;
  } mg;
  merge_cmd->add_option("--db", mg.dbs, "Skill database (repeat)")->required()->take_all();
  merge_cmd->add_option("--out", mg.out, "Write the merged database here");
  merge_cmd->callback([&] {
    SkillDb merged = load_skill_db(slurp(mg.dbs[0]));
    for (size_t i = 1; i < mg.dbs.size(); ++i)
      merged = share_skills(load_skill_db(slurp(mg.dbs[i])), merged);
    std::string text = dump_skill_db(merged);
    if (mg.out.empty())
      std::cout << text;
    else
      spill(mg.out, text);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const NoMatchError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 6;
  } catch (const AmbiguousMatchError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 6;
  } catch (const AmbiguousBindingError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 6;
  } catch (const EmptyDemoDiffError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 6;
  } catch (const UnknownSymbolError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 3;
  } catch (const UncoveredPredicateError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 3;
  } catch (const MissingPropertyError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 3;
  } catch (const InheritanceAmbiguityError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 3;
  } catch (const SkillConflictError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 3;
  } catch (const UnboundSkillError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 3;
  } catch (const ResourceLimitError& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "maestrob: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "maestrob: internal fault: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
