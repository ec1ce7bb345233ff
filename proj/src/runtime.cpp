#include "maestrob/runtime.hpp"

#include <algorithm>
#include <utility>

#include "maestrob/errors.hpp"
#include "maestrob/hash.hpp"
#include "maestrob/pddl/parser.hpp"
#include "maestrob/pddl/printer.hpp"

namespace maestrob {
namespace {

using nlohmann::json;

Symbol symbol_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string() || !Symbol::valid(j[key].get<std::string>()))
    throw ValidationError(where + " needs a '" + key + "' identifier");
  return Symbol(j[key].get<std::string>());
}

std::vector<std::string> parse_args(const json& j) {
  std::vector<std::string> out;
  if (!j.contains("args")) return out;
  if (!j["args"].is_array()) throw ParseError(0, "'args' must be an array of strings");
  for (const json& a : j["args"]) {
    if (!a.is_string()) throw ParseError(0, "'args' must be an array of strings");
    out.push_back(a.get<std::string>());
  }
  return out;
}

void check_param_refs(const Skill& s, const std::vector<std::string>& args) {
  for (const std::string& a : args) {
    if (a.empty() || a[0] != '?') continue;
    std::string var = a.substr(1);
    bool known = std::any_of(s.params.begin(), s.params.end(),
                             [&](const pddl::Param& p) { return p.var == var; });
    if (!known)
      throw ValidationError("skill '" + s.name.str() + "' references undeclared parameter " + a);
  }
}

Invocation parse_invocation(const json& j, const char* where) {
  if (!j.is_object()) throw ParseError(0, std::string(where) + " entries must be objects");
  Invocation inv;
  bool has_g = j.contains("gesture"), has_s = j.contains("skill");
  if (has_g == has_s)
    throw ValidationError(std::string(where) + " entries name exactly one of 'gesture'/'skill'");
  inv.is_gesture = has_g;
  const json& n = has_g ? j["gesture"] : j["skill"];
  if (!n.is_string() || !Symbol::valid(n.get<std::string>()))
    throw ValidationError(std::string(where) + " entries need an identifier name");
  inv.name = Symbol(n.get<std::string>());
  inv.args = parse_args(j);
  return inv;
}

// Depth-first walk over skill references; `state` holds 0 = unvisited,
// 1 = on the current path, 2 = done.
void check_cycles(const SkillDb& db, const std::map<Symbol, size_t>& index, size_t at,
                  std::vector<int>& state, std::vector<Symbol>& path) {
  if (state[at] == 2) return;
  if (state[at] == 1) {
    std::string chain;
    for (const Symbol& s : path) chain += s.str() + " -> ";
    throw CyclicCompositeError("skill reference cycle: " + chain + db[at].name.str());
  }
  state[at] = 1;
  path.push_back(db[at].name);
  for (const Invocation& inv : db[at].body.children) {
    if (inv.is_gesture) continue;
    auto it = index.find(inv.name);
    if (it == index.end())
      throw ValidationError("skill '" + db[at].name.str() + "' references unknown skill '" +
                            inv.name.str() + "'");
    if (inv.args.size() != db[it->second].params.size())
      throw ValidationError("skill '" + db[at].name.str() + "' passes " +
                            std::to_string(inv.args.size()) + " args to '" + inv.name.str() +
                            "' which takes " + std::to_string(db[it->second].params.size()));
    check_cycles(db, index, it->second, state, path);
  }
  path.pop_back();
  state[at] = 2;
}

void validate_db(const SkillDb& db) {
  std::map<Symbol, size_t> index;
  for (size_t i = 0; i < db.size(); ++i)
    if (!index.emplace(db[i].name, i).second)
      throw ValidationError("duplicate skill '" + db[i].name.str() + "'");

  std::map<Symbol, Symbol> bindings;
  for (const Skill& s : db) {
    if (s.binds.empty()) continue;
    auto [it, fresh] = bindings.emplace(s.binds, s.name);
    if (!fresh)
      throw DuplicateBindingError("action schema '" + s.binds.str() + "' is bound by both '" +
                                  it->second.str() + "' and '" + s.name.str() + "'");
  }

  std::vector<int> state(db.size(), 0);
  std::vector<Symbol> path;
  for (size_t i = 0; i < db.size(); ++i) check_cycles(db, index, i, state, path);
}

const Skill* find_skill(const SkillDb& db, const Symbol& name) {
  for (const Skill& s : db)
    if (s.name == name) return &s;
  return nullptr;
}

Fact substitute_fact(const pddl::Atom& atom, const std::map<std::string, Symbol>& env) {
  Fact f;
  f.predicate = atom.predicate;
  for (const pddl::Term& t : atom.args) {
    if (t.kind == pddl::Term::Kind::Constant) {
      f.args.emplace_back(Symbol(t.name));
    } else {
      auto it = env.find(t.name);
      if (it == env.end())
        throw ValidationError("unbound rule variable ?" + t.name);
      f.args.push_back(it->second);
    }
  }
  return f;
}

// Inner executor carrying the enclosing-step context.
struct Executor {
  const SkillDb& db;
  SimWorld& world;

  SkillOutcome run(const Skill& skill, const std::map<std::string, Symbol>& env) {
    double start = world.clock();
    auto overtime = [&] { return world.clock() - start > skill.timeout; };

    switch (skill.body.type) {
      case SkillBody::Type::External:
        try {
          world.perform_gesture(Symbol("wait"));  // one opaque unit of work
        } catch (const UnknownGestureError& e) {
          return {false, e.what()};
        }
        return {};
      case SkillBody::Type::Rule:
        for (const RuleClause& c : skill.body.clauses) {
          Fact cond = substitute_fact(c.condition.atom, env);
          bool holds = std::binary_search(world.state().facts.begin(),
                                          world.state().facts.end(), cond);
          if (holds == c.condition.positive) {
            SkillOutcome o = fire(skill, c.gesture, env);
            if (!o.success) return o;
            if (overtime()) return {false, "timeout in '" + skill.name.str() + "'"};
          }
        }
        return {};
      case SkillBody::Type::Composite:
        for (const Invocation& inv : skill.body.children) {
          SkillOutcome o = fire(skill, inv, env);
          if (!o.success) return o;
          if (overtime()) return {false, "timeout in '" + skill.name.str() + "'"};
        }
        return {};
    }
    return {false, "corrupt skill body"};
  }

  SkillOutcome fire(const Skill& parent, const Invocation& inv,
                    const std::map<std::string, Symbol>& env) {
    if (inv.is_gesture) {
      try {
        world.perform_gesture(inv.name);
      } catch (const UnknownGestureError& e) {
        return {false, e.what()};
      }
      return {};
    }
    const Skill* child = find_skill(db, inv.name);
    if (!child) return {false, "unknown skill '" + inv.name.str() + "'"};
    if (inv.args.size() != child->params.size())
      return {false, "arity mismatch invoking '" + inv.name.str() + "'"};
    std::map<std::string, Symbol> child_env;
    for (size_t i = 0; i < inv.args.size(); ++i) {
      const std::string& a = inv.args[i];
      Symbol value;
      if (!a.empty() && a[0] == '?') {
        auto it = env.find(a.substr(1));
        if (it == env.end())
          return {false, "unbound argument " + a + " in '" + parent.name.str() + "'"};
        value = it->second;
      } else {
        value = Symbol(a);
      }
      child_env.emplace(child->params[i].var, value);
    }
    return run(*child, child_env);
  }
};

json facts_json(const std::vector<Fact>& facts) {
  json out = json::array();
  for (const Fact& f : facts) out.push_back(f.str());
  return out;
}

struct SubscriptionGuard {
  Blackboard& bus;
  std::uint64_t id;
  ~SubscriptionGuard() { bus.unsubscribe(id); }
};

}  // namespace

SkillDb load_skill_db(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_object() || !doc.contains("skills") || !doc["skills"].is_array())
    throw ParseError(0, "expected an object with a 'skills' array");

  SkillDb db;
  for (const json& js : doc["skills"]) {
    if (!js.is_object()) throw ParseError(0, "skill entries must be objects");
    Skill s;
    s.name = symbol_field(js, "name", "skill");

    if (js.contains("params")) {
      if (!js["params"].is_array()) throw ParseError(0, "'params' must be an array");
      for (const json& jp : js["params"]) {
        if (!jp.is_object() || !jp.contains("var") || !jp["var"].is_string())
          throw ParseError(0, "params entries are {var, type} objects");
        std::string var = jp["var"].get<std::string>();
        if (var.size() < 2 || var[0] != '?' || !Symbol::valid(var.substr(1)))
          throw ValidationError("parameter '" + var + "' is not a '?variable'");
        Symbol type("object");
        if (jp.contains("type")) type = symbol_field(jp, "type", "param");
        s.params.push_back({Symbol(var.substr(1)).str(), type});
      }
    }

    if (js.contains("binds")) s.binds = symbol_field(js, "binds", "skill");
    if (js.contains("timeout")) {
      if (!js["timeout"].is_number() || js["timeout"].get<double>() <= 0)
        throw ValidationError("skill '" + s.name.str() + "' timeout must be positive");
      s.timeout = js["timeout"].get<double>();
    }

    if (!js.contains("body") || !js["body"].is_object())
      throw ParseError(0, "skill '" + s.name.str() + "' needs a 'body' object");
    const json& body = js["body"];
    std::string type = body.value("type", "");
    if (type == "composite") {
      s.body.type = SkillBody::Type::Composite;
      std::string order = body.value("order", "sequential");
      if (order != "sequential" && order != "parallel")
        throw ValidationError("composite order must be 'sequential' or 'parallel'");
      s.body.parallel = order == "parallel";
      if (body.contains("children")) {
        if (!body["children"].is_array()) throw ParseError(0, "'children' must be an array");
        for (const json& jc : body["children"]) {
          Invocation inv = parse_invocation(jc, "composite children");
          check_param_refs(s, inv.args);
          s.body.children.push_back(std::move(inv));
        }
      }
    } else if (type == "rule") {
      s.body.type = SkillBody::Type::Rule;
      if (!body.contains("clauses") || !body["clauses"].is_array())
        throw ParseError(0, "rule bodies need a 'clauses' array");
      for (const json& jc : body["clauses"]) {
        if (!jc.is_object() || !jc.contains("if") || !jc["if"].is_string() ||
            !jc.contains("then"))
          throw ParseError(0, "rule clauses are {if, then} objects");
        RuleClause clause;
        clause.condition = pddl::parse_single_literal(jc["if"].get<std::string>());
        for (const pddl::Term& t : clause.condition.atom.args)
          if (t.kind == pddl::Term::Kind::Variable) check_param_refs(s, {"?" + t.name});
        clause.gesture = parse_invocation(jc["then"], "rule actions");
        if (!clause.gesture.is_gesture)
          throw ValidationError("rule clauses fire gestures, not skills");
        check_param_refs(s, clause.gesture.args);
        s.body.clauses.push_back(std::move(clause));
      }
    } else if (type == "external") {
      s.body.type = SkillBody::Type::External;
      if (!body.contains("id") || !body["id"].is_string())
        throw ParseError(0, "external bodies need an 'id' string");
      s.body.external_id = body["id"].get<std::string>();
    } else {
      throw ValidationError("unknown body type '" + type + "'");
    }
    db.push_back(std::move(s));
  }
  validate_db(db);
  return db;
}

SkillDb share_skills(const SkillDb& from, const SkillDb& to) {
  SkillDb merged = to;
  for (const Skill& s : from) {
    const Skill* existing = find_skill(merged, s.name);
    if (!existing) {
      merged.push_back(s);
    } else if (!(*existing == s)) {
      throw SkillConflictError(s.name.str());
    }
  }
  validate_db(merged);
  return merged;
}

namespace {

json invocation_json(const Invocation& inv) {
  json j{{inv.is_gesture ? "gesture" : "skill", inv.name.str()}, {"args", inv.args}};
  return j;
}

}  // namespace

std::string dump_skill_db(const SkillDb& db) {
  json skills = json::array();
  for (const Skill& s : db) {
    json js{{"name", s.name.str()}, {"timeout", s.timeout}};
    json params = json::array();
    for (const pddl::Param& p : s.params)
      params.push_back(json{{"var", "?" + p.var}, {"type", p.type.str()}});
    js["params"] = params;
    if (!s.binds.empty()) js["binds"] = s.binds.str();
    json body;
    switch (s.body.type) {
      case SkillBody::Type::Composite: {
        body["type"] = "composite";
        body["order"] = s.body.parallel ? "parallel" : "sequential";
        json children = json::array();
        for (const Invocation& inv : s.body.children) children.push_back(invocation_json(inv));
        body["children"] = children;
        break;
      }
      case SkillBody::Type::Rule: {
        body["type"] = "rule";
        json clauses = json::array();
        for (const RuleClause& c : s.body.clauses)
          clauses.push_back(
              json{{"if", pddl::to_string(c.condition)}, {"then", invocation_json(c.gesture)}});
        body["clauses"] = clauses;
        break;
      }
      case SkillBody::Type::External:
        body["type"] = "external";
        body["id"] = s.body.external_id;
        break;
    }
    js["body"] = body;
    skills.push_back(js);
  }
  return json{{"skills", skills}}.dump(2) + "\n";
}

std::vector<ScriptedFailure> load_failure_script(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_object() || !doc.contains("failures") || !doc["failures"].is_array())
    throw ParseError(0, "expected an object with a 'failures' array");
  std::vector<ScriptedFailure> out;
  for (const json& jf : doc["failures"]) {
    if (!jf.is_object() || !jf.contains("step") || !jf["step"].is_number_unsigned())
      throw ParseError(0, "failure entries need an unsigned 'step'");
    ScriptedFailure f;
    f.step = jf["step"].get<std::uint64_t>();
    f.kind = jf.value("kind", "failure");
    if (jf.contains("perturbation")) f.perturbation = jf["perturbation"];
    out.push_back(std::move(f));
  }
  return out;
}

std::set<std::string> SimWorld::default_gestures() {
  return {"move-above", "move-down", "move-up", "close-gripper",
          "open-gripper", "stop", "wait", "speak", "point"};
}

SimWorld::SimWorld(std::vector<scene::ObjectInstance> instances,
                   std::vector<scene::ObjectKind> kinds, scene::RelationParams params,
                   std::set<std::string> supported, std::uint64_t seed)
    : instances_(std::move(instances)),
      kinds_(std::move(kinds)),
      params_(params),
      supported_(std::move(supported)),
      rng_(seed) {
  refresh();
}

void SimWorld::refresh() { state_ = scene::extract_state(instances_, kinds_, params_); }

void SimWorld::set_failure_script(std::vector<ScriptedFailure> script) {
  script_.clear();
  for (ScriptedFailure& f : script) {
    std::uint64_t step = f.step;
    if (!script_.emplace(step, std::move(f)).second)
      throw ValidationError("failure script has two entries for step " + std::to_string(step));
  }
}

void SimWorld::set_transient_failure_probability(double p) {
  if (p < 0 || p > 1 || !(p == p)) throw ValidationError("failure probability must be in [0,1]");
  transient_p_ = p;
}

std::optional<ScriptedFailure> SimWorld::take_failure(std::uint64_t step) {
  auto it = script_.find(step);
  if (it != script_.end()) {
    ScriptedFailure f = std::move(it->second);
    script_.erase(it);
    return f;
  }
  if (transient_p_ > 0 &&
      std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < transient_p_) {
    ScriptedFailure f;
    f.step = step;
    f.kind = "transient";
    return f;
  }
  return std::nullopt;
}

void SimWorld::perform_gesture(const Symbol& name) {
  if (!supported_.count(name.str())) throw UnknownGestureError(name.str());
  clock_ += 1.0;
}

scene::ObjectInstance& SimWorld::find(const Symbol& id) {
  for (scene::ObjectInstance& inst : instances_)
    if (inst.id == id) return inst;
  throw ValidationError("no instance '" + id.str() + "' in the world");
}

void SimWorld::apply_op(const json& op) {
  if (!op.is_object() || !op.contains("op") || !op["op"].is_string())
    throw ValidationError("world ops are {op, ...} objects");
  std::string kind = op["op"].get<std::string>();
  if (kind == "remove") {
    Symbol id = symbol_field(op, "id", "remove op");
    find(id);  // reject unknown ids
    instances_.erase(std::remove_if(instances_.begin(), instances_.end(),
                                    [&](const scene::ObjectInstance& i) { return i.id == id; }),
                     instances_.end());
  } else if (kind == "add") {
    if (!op.contains("object")) throw ValidationError("add op needs an 'object'");
    // route through the scene loader so the usual checks apply
    auto loaded = scene::load_scene(json{{"objects", json::array({op["object"]})}}.dump());
    for (const scene::ObjectInstance& existing : instances_)
      if (existing.id == loaded[0].id)
        throw ValidationError("instance '" + existing.id.str() + "' already in the world");
    instances_.push_back(loaded[0]);
  } else if (kind == "move") {
    Symbol id = symbol_field(op, "id", "move op");
    if (!op.contains("position") || !op["position"].is_array() || op["position"].size() != 3)
      throw ValidationError("move op needs a [x,y,z] position");
    scene::ObjectInstance& inst = find(id);
    for (int i = 0; i < 3; ++i)
      if (!op["position"][i].is_number()) throw ValidationError("move op needs numbers");
    inst.pose.x = op["position"][0].get<double>();
    inst.pose.y = op["position"][1].get<double>();
    inst.pose.z = op["position"][2].get<double>();
  } else {
    throw ValidationError("unknown world op '" + kind + "'");
  }
  refresh();
}

void SimWorld::place_in(const Symbol& peg, const Symbol& hole) {
  scene::ObjectInstance& a = find(peg);
  scene::ObjectInstance& b = find(hole);
  const scene::ObjectKind* ka = nullptr;
  const scene::ObjectKind* kb = nullptr;
  for (const scene::ObjectKind& k : kinds_) {
    if (k.id == a.kind) ka = &k;
    if (k.id == b.kind) kb = &k;
  }
  if (!ka || !kb) throw UnknownKindError((ka ? b : a).id.str());
  a.pose.x = b.pose.x;
  a.pose.y = b.pose.y;
  double top = b.pose.z + kb->body_height() / 2;
  double bottom = kb->cavity ? top - kb->cavity->depth : top;
  a.pose.z = bottom + ka->body_height() / 2;
  refresh();
}

void SimWorld::place_on(const Symbol& obj, const Symbol& base) {
  scene::ObjectInstance& a = find(obj);
  scene::ObjectInstance& b = find(base);
  const scene::ObjectKind* ka = nullptr;
  const scene::ObjectKind* kb = nullptr;
  for (const scene::ObjectKind& k : kinds_) {
    if (k.id == a.kind) ka = &k;
    if (k.id == b.kind) kb = &k;
  }
  if (!ka || !kb) throw UnknownKindError((ka ? b : a).id.str());
  a.pose.x = b.pose.x;
  a.pose.y = b.pose.y;
  a.pose.z = b.pose.z + kb->body_height() / 2 + ka->body_height() / 2;
  refresh();
}

SkillOutcome execute_skill(const SkillDb& db, const Skill& skill, const std::vector<Symbol>& args,
                           SimWorld& world, const GroundAction* action) {
  if (args.size() != skill.params.size())
    throw ValidationError("skill '" + skill.name.str() + "' takes " +
                          std::to_string(skill.params.size()) + " args, got " +
                          std::to_string(args.size()));
  std::map<std::string, Symbol> env;
  for (size_t i = 0; i < args.size(); ++i) env.emplace(skill.params[i].var, args[i]);

  Executor ex{db, world};
  SkillOutcome out = ex.run(skill, env);
  if (!out.success || !action) return out;

  // pose updates implied by the symbolic effects
  for (const Fact& f : action->add) {
    if (f.args.size() != 2) continue;
    if (f.predicate.str() == "in") world.place_in(f.args[0], f.args[1]);
    if (f.predicate.str() == "on") world.place_on(f.args[0], f.args[1]);
  }
  const std::vector<Fact>& facts = world.state().facts;
  for (const Fact& f : action->add)
    if (!std::binary_search(facts.begin(), facts.end(), f))
      return {false, "effect " + f.str() + " did not hold after execution"};
  for (const Fact& f : action->del)
    if (std::binary_search(facts.begin(), facts.end(), f))
      return {false, "effect (not " + f.str() + ") did not hold after execution"};
  return out;
}

std::string state_digest(const std::vector<Fact>& facts) {
  std::uint64_t h = kFnvOffset;
  for (const Fact& f : facts) {
    h = fnv1a(f.str(), h);
    h = fnv1a("\n", h);
  }
  return hex64(h);
}

std::string trace_to_string(const ExecutionTrace& trace) {
  std::string out;
  for (const TraceEvent& e : trace.events) {
    out += std::to_string(e.step);
    out += ' ';
    out += e.skill.str();
    out += e.success ? " success " : " failure ";
    out += e.digest;
    out += '\n';
  }
  return out;
}

ExecutionTrace run_plan(const pddl::Domain& domain, const pddl::Problem& problem,
                        const Ontology& ontology, const std::vector<ConstraintRule>& rules,
                        const SkillDb& skills, SimWorld& world, Blackboard& bus,
                        const ReplanPolicy& policy) {
  // every schema must be executable before anything runs
  std::map<Symbol, const Skill*> bound;
  for (const pddl::ActionSchema& schema : domain.actions) {
    const Skill* match = nullptr;
    for (const Skill& s : skills)
      if (s.binds == schema.name) match = &s;
    if (!match) throw UnboundSkillError(schema.name.str());
    if (match->params.size() != schema.params.size())
      throw ValidationError("skill '" + match->name.str() + "' arity differs from action '" +
                            schema.name.str() + "'");
    bound.emplace(schema.name, match);
  }

  std::deque<json> responses;
  SubscriptionGuard responder{bus, bus.subscribe("human/assistance-response", [&](const Message& m) {
                                responses.push_back(m.payload);
                              })};

  ExecutionTrace trace;
  int replans = 0;
  std::uint64_t step_counter = 0;

  auto finish = [&](Terminal::Kind kind, const std::string& reason) -> ExecutionTrace& {
    trace.terminal.kind = kind;
    trace.terminal.replans = replans;
    trace.terminal.reason = reason;
    return trace;
  };

  for (;;) {
    const scene::SceneState& state = world.state();
    bus.publish("perception/state",
                json{{"digest", state_digest(state.facts)}, {"facts", facts_json(state.facts)}},
                "perception");

    ResolvedPair resolved = resolve(domain, problem, ontology, state, rules);
    std::vector<GroundAction> actions = ground(resolved.domain, resolved.problem);
    std::optional<PlanResult> result =
        plan(resolved.problem.init, resolved.problem.goal, actions, policy.limits, policy.mode);

    if (!result) {
      bus.publish("planner/plan", json{{"steps", json::array()}, {"outcome", "no-plan"}},
                  "planner");
      bus.publish("runtime/assistance-request", json{{"reason", "no-plan"}}, "runtime");
      if (responses.empty())
        return finish(Terminal::Kind::AssistanceRequested, "no-plan");
      json response = std::move(responses.front());
      responses.pop_front();
      if (response.is_object() && response.contains("ops") && response["ops"].is_array())
        for (const json& op : response["ops"]) world.apply_op(op);
      continue;
    }

    json steps = json::array();
    for (const GroundAction& a : result->steps) steps.push_back(a.str());
    bus.publish("planner/plan", json{{"steps", steps}, {"outcome", "plan"}}, "planner");

    bool failed = false;
    for (const GroundAction& a : result->steps) {
      std::uint64_t step = step_counter++;
      const Skill* skill = bound.at(a.schema);

      SkillOutcome outcome;
      std::optional<ScriptedFailure> fault = world.take_failure(step);
      if (fault) {
        if (!fault->perturbation.is_null()) world.apply_op(fault->perturbation);
        outcome = {false, fault->kind};
      } else {
        outcome = execute_skill(skills, *skill, a.binding, world, &a);
      }

      TraceEvent event;
      event.step = step;
      event.skill = skill->name;
      event.success = outcome.success;
      event.digest = state_digest(world.state().facts);
      event.timestamp = world.clock();
      event.note = outcome.note;
      trace.events.push_back(event);
      bus.publish("runtime/trace",
                  json{{"digest", event.digest},
                       {"outcome", event.success ? "success" : "failure"},
                       {"skill", event.skill.str()},
                       {"step", event.step}},
                  "runtime");

      if (!outcome.success) {
        ++replans;
        if (replans > policy.max_replans) {
          bus.publish("runtime/assistance-request", json{{"reason", "replan-limit"}}, "runtime");
          return finish(Terminal::Kind::AssistanceRequested, "replan-limit");
        }
        failed = true;
        break;
      }
    }
    if (failed) continue;

    return finish(replans == 0 ? Terminal::Kind::Succeeded : Terminal::Kind::ReplannedThenSucceeded,
                  "");
  }
}

}  // namespace maestrob
