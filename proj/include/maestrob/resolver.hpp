#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maestrob/fact.hpp"
#include "maestrob/ontology.hpp"
#include "maestrob/pddl/ast.hpp"
#include "maestrob/scene/scene.hpp"
#include "maestrob/symbol.hpp"

// Semantic resolution: combine annotated planning files, the ontology, and
// scene-derived object properties into a runnable plain domain/problem pair,
// materializing physical-constraint facts (insertable) as static init facts.
namespace maestrob {

struct ConstraintRule {
  Symbol name;                           // the derived predicate
  std::vector<std::string> param_kinds;  // class URI per argument; "" = any
  std::string guard = "fits-cavity";
  double clearance = 0.0005;  // meters
};

// The canonical peg-into-hole rule, used when no rule file is given:
// insertable(a, b) over any object pair, fit decided by the guard.
ConstraintRule builtin_insertable_rule();

// {"rules": [{"name": ..., "paramKinds": [uri, uri],
//             "guard": {"id": "fits-cavity", "clearance": 0.0005}}]}
std::vector<ConstraintRule> load_rules(std::string_view text);

// satisfied when lhs <= rhs
struct Inequality {
  double lhs = 0;
  double rhs = 0;
};

// One record per evaluated argument tuple, kept for rejected tuples too,
// so every fit decision replays from the stored numbers alone.
struct ProvenanceEntry {
  Fact fact;
  Symbol rule;
  std::string guard;
  std::vector<std::string> uris;   // canonical kind URI per argument
  std::vector<Inequality> checks;  // conjunction; empty only with a note
  bool emitted = false;
  std::string note;  // "no-cavity" when the target cannot hold anything
};

struct DerivedFacts {
  std::vector<Fact> facts;                  // sorted, deduplicated
  std::vector<ProvenanceEntry> provenance;  // evaluation order
};

// Evaluates every rule over every ordered tuple of distinct objects whose
// kind URIs satisfy the rule's parameter restrictions (via isa). Throws
// MissingPropertyError when a guard needs an unasserted property.
DerivedFacts derive_facts(const std::vector<std::pair<Symbol, std::string>>& objects,
                          const Ontology& ontology, const std::vector<ConstraintRule>& rules);

struct ResolvedPair {
  pddl::Domain domain;    // context stripped, predicates extended
  pddl::Problem problem;  // init = original ∪ scene facts ∪ derived
  std::vector<Fact> derived;
  std::vector<ProvenanceEntry> provenance;
};

// The full resolution pass. Constraint derivation runs over the problem
// objects that carry a context URI and are present in the scene. Throws
// ValidationError (name mismatch, conflicting context), UnknownSymbolError,
// UncoveredPredicateError, MissingPropertyError.
ResolvedPair resolve(const pddl::Domain& domain, const pddl::Problem& problem,
                     const Ontology& ontology, const scene::SceneState& scene,
                     const std::vector<ConstraintRule>& rules);

// One line per evaluated tuple, numbers printed with %.9g.
std::string provenance_report(const std::vector<ProvenanceEntry>& entries);

// Problem skeleton for goals that arrive without a problem file (utterance
// or demonstration): every scene instance becomes an object, typed by the
// most specific domain type whose context class covers the instance kind
// (object when none does), with the instance's kind URI as context.
pddl::Problem synthesize_problem(Symbol name, const pddl::Domain& domain,
                                 const std::vector<scene::ObjectInstance>& instances,
                                 const std::vector<scene::ObjectKind>& kinds,
                                 const Ontology& ontology, std::vector<pddl::GroundLiteral> goal);

}  // namespace maestrob
