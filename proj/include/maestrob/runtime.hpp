#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "maestrob/blackboard.hpp"
#include "maestrob/fact.hpp"
#include "maestrob/ontology.hpp"
#include "maestrob/pddl/ast.hpp"
#include "maestrob/planner.hpp"
#include "maestrob/resolver.hpp"
#include "maestrob/scene/scene.hpp"
#include "maestrob/symbol.hpp"

namespace maestrob {

// One invocation inside a composite body: either a platform gesture or a
// reference to another skill. Args starting with `?` name a parameter of
// the enclosing skill; anything else is passed through verbatim.
struct Invocation {
  bool is_gesture = true;
  Symbol name;
  std::vector<std::string> args;
  auto operator<=>(const Invocation&) const = default;
};

// `if {condition} then {gesture}`.
struct RuleClause {
  pddl::Literal condition;
  Invocation gesture;
  bool operator==(const RuleClause&) const = default;
};

struct SkillBody {
  enum class Type { Composite, Rule, External };
  Type type = Type::Composite;
  bool parallel = false;               // composites; the sim serializes either way
  std::vector<Invocation> children;    // composite
  std::vector<RuleClause> clauses;     // rule
  std::string external_id;             // external
  bool operator==(const SkillBody&) const = default;
};

struct Skill {
  Symbol name;
  std::vector<pddl::Param> params;
  Symbol binds;           // action schema this skill implements; may be empty
  SkillBody body;
  double timeout = 10.0;  // simulated seconds
  bool operator==(const Skill&) const = default;
};

using SkillDb = std::vector<Skill>;

// Skill file: {"skills": [{name, params: [{var, type}], binds?,
// timeout?, body: {type: composite|rule|external, ...}}]}.
// Composite bodies list children as {"gesture": g, "args": [...]} or
// {"skill": s, "args": [...]}; rule bodies list clauses as
// {"if": "(pred ?x)", "then": {gesture, args}}. Throws ParseError /
// ValidationError on malformed input, CyclicCompositeError when skill
// references form a cycle, DuplicateBindingError when two skills bind
// the same action schema.
SkillDb load_skill_db(std::string_view text);

// Union keyed by skill name: identical duplicates collapse, a name bound
// to two differing definitions throws SkillConflictError. The merged db
// is re-checked for duplicate schema bindings.
SkillDb share_skills(const SkillDb& from, const SkillDb& to);

// Inverse of load_skill_db: load(dump(db)) == db.
std::string dump_skill_db(const SkillDb& db);

// A scripted execution fault, keyed by the global step counter. The
// perturbation (optional) is a world op, applied when the fault fires.
struct ScriptedFailure {
  std::uint64_t step = 0;
  std::string kind;
  nlohmann::json perturbation;  // null when absent
};

// Failure script file: {"failures": [{step, kind, perturbation?}]}.
std::vector<ScriptedFailure> load_failure_script(std::string_view text);

// Simulated world: instance poses are ground truth, symbolic facts are
// re-extracted after every mutation. The clock is logical; a gesture
// costs one second.
class SimWorld {
 public:
  SimWorld(std::vector<scene::ObjectInstance> instances, std::vector<scene::ObjectKind> kinds,
           scene::RelationParams params = {}, std::set<std::string> supported = default_gestures(),
           std::uint64_t seed = 0);

  static std::set<std::string> default_gestures();

  const scene::SceneState& state() const { return state_; }
  const std::vector<scene::ObjectInstance>& instances() const { return instances_; }
  const std::vector<scene::ObjectKind>& kinds() const { return kinds_; }
  double clock() const { return clock_; }

  // Throws ValidationError on duplicate step indices.
  void set_failure_script(std::vector<ScriptedFailure> script);
  // Chance of an unscripted transient fault per step, drawn from the
  // seeded generator; 0 disables the soak mode.
  void set_transient_failure_probability(double p);

  // The scripted (or drawn) fault for this step, consumed on return.
  std::optional<ScriptedFailure> take_failure(std::uint64_t step);

  // Advances the clock by one second. Throws UnknownGestureError.
  void perform_gesture(const Symbol& name);

  // {"op": "remove", "id"} | {"op": "add", "object": {...}} |
  // {"op": "move", "id", "position": [x,y,z]}. Re-extracts facts.
  void apply_op(const nlohmann::json& op);

  // Pose semantics of effect facts. `in`: xy snapped to the cavity axis,
  // z = cavity bottom + half height. `on`: seated on top.
  void place_in(const Symbol& peg, const Symbol& hole);
  void place_on(const Symbol& obj, const Symbol& base);

 private:
  scene::ObjectInstance& find(const Symbol& id);
  void refresh();

  std::vector<scene::ObjectInstance> instances_;
  std::vector<scene::ObjectKind> kinds_;
  scene::RelationParams params_;
  std::set<std::string> supported_;
  scene::SceneState state_;
  double clock_ = 0.0;
  std::map<std::uint64_t, ScriptedFailure> script_;
  double transient_p_ = 0.0;
  std::mt19937_64 rng_;
};

struct SkillOutcome {
  bool success = true;
  std::string note;  // cause on failure: gesture, timeout, effect mismatch
};

// Runs a skill body against the world: composites execute children in
// order (parallel lists are serialized in simulation), rules fire the
// gestures whose conditions hold, external stubs take one second. An
// unknown gesture or an exceeded timeout fails the skill instead of
// throwing. When `action` is given and execution succeeded, its add
// effects drive pose updates and the re-extracted facts must absorb the
// add list and drop the delete list, else the outcome is a failure.
SkillOutcome execute_skill(const SkillDb& db, const Skill& skill,
                           const std::vector<Symbol>& args, SimWorld& world,
                           const GroundAction* action = nullptr);

struct TraceEvent {
  std::uint64_t step = 0;  // global across replans
  Symbol skill;
  bool success = false;
  std::string digest;  // fnv1a-64 of the post-step fact set, hex
  double timestamp = 0.0;
  std::string note;
};

struct Terminal {
  enum class Kind { Succeeded, ReplannedThenSucceeded, AssistanceRequested };
  Kind kind = Kind::Succeeded;
  int replans = 0;
  std::string reason;  // "no-plan" or "replan-limit"
};

struct ExecutionTrace {
  std::vector<TraceEvent> events;
  Terminal terminal;
};

struct ReplanPolicy {
  int max_replans = 5;
  PlanLimits limits;
  SearchMode mode = SearchMode::Breadth;
};

// `<step> <skill> <success|failure> <digest>` per event.
std::string trace_to_string(const ExecutionTrace& trace);

// Hash of the fact set as it appears in traces and bus messages.
std::string state_digest(const std::vector<Fact>& facts);

// Plan-execute-replan loop. Each cycle re-extracts the world state,
// resolves the domain/problem pair against it (problem init facts are
// carried verbatim as static background), plans, and executes. A failed
// step increments the replan count and starts a new cycle; more than
// policy.max_replans failures terminate with AssistanceRequested. When
// no plan exists the loop publishes `runtime/assistance-request` and
// consumes one queued `human/assistance-response` (its "ops" array is
// applied to the world) or terminates. Publishes `perception/state`,
// `planner/plan` and `runtime/trace` along the way.
//
// Throws UnboundSkillError when a domain action has no bound skill (or
// ValidationError on an arity mismatch) before touching the world.
ExecutionTrace run_plan(const pddl::Domain& domain, const pddl::Problem& problem,
                        const Ontology& ontology, const std::vector<ConstraintRule>& rules,
                        const SkillDb& skills, SimWorld& world, Blackboard& bus,
                        const ReplanPolicy& policy = {});

}  // namespace maestrob
