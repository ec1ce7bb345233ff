#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maestrob/fact.hpp"
#include "maestrob/pddl/ast.hpp"

// Forward state-space search over the resolved STRIPS task: exhaustive
// grounding, breadth-first search for shortest plans, and a replay checker.
namespace maestrob {

struct GroundAction {
  Symbol schema;
  std::vector<Symbol> binding;  // one object per schema parameter
  std::vector<Fact> pre_pos;    // all fact lists sorted
  std::vector<Fact> pre_neg;
  std::vector<Fact> add;
  std::vector<Fact> del;

  auto operator<=>(const GroundAction&) const = default;
  std::string str() const;  // `(name arg ...)`
};

// Every type-respecting binding, in (schema, binding) order. Bindings whose
// grounded add and delete lists intersect are skipped (the lists must stay
// disjoint after grounding), as are bindings requiring a static fact —
// a predicate no effect ever touches — that init does not provide.
std::vector<GroundAction> ground(const pddl::Domain& domain, const pddl::Problem& problem);

struct PlanLimits {
  std::uint64_t max_nodes = 1000000;  // expansions before ResourceLimitError
  double max_seconds = 30.0;
};

enum class SearchMode {
  Breadth,          // shortest plan, deterministic tie-breaking
  GreedyGoalCount,  // best-first on unsatisfied goal count; not optimal
};

struct PlanStats {
  std::uint64_t expanded = 0;
  double seconds = 0;
};

struct PlanResult {
  std::vector<GroundAction> steps;
  PlanStats stats;
};

// nullopt means the goal is unreachable (an ordinary result); hitting a
// configured bound throws ResourceLimitError instead. Closed world:
// negative literals hold when the fact is absent.
std::optional<PlanResult> plan(const std::vector<Fact>& init,
                               const std::vector<pddl::GroundLiteral>& goal,
                               const std::vector<GroundAction>& actions,
                               const PlanLimits& limits = {},
                               SearchMode mode = SearchMode::Breadth);

struct Violation {
  size_t step = 0;  // steps.size() marks goal failure after a clean replay
  std::string message;
};

// Replays steps from init; nullopt when every precondition and the goal
// hold. Shares no machinery with plan(), so it doubles as its check.
std::optional<Violation> validate(const std::vector<Fact>& init,
                                  const std::vector<GroundAction>& steps,
                                  const std::vector<pddl::GroundLiteral>& goal);

// One step per line: `<index>: (<name> <arg> ...)`, zero-based.
std::string plan_to_string(const std::vector<GroundAction>& steps);

}  // namespace maestrob
