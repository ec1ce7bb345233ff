#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "maestrob/ontology.hpp"
#include "maestrob/pddl/ast.hpp"
#include "maestrob/scene/scene.hpp"
#include "maestrob/symbol.hpp"

namespace maestrob {

// A goal template pairs trigger phrases with a parameterized goal. Slot
// variables in the goal bind to scene objects whose kind satisfies the
// slot's class restriction.
struct GoalTemplate {
  Symbol id;
  std::vector<std::string> phrases;       // at least one
  std::vector<pddl::Literal> goal;        // slot variables allowed as args
  std::map<std::string, std::string> slots;  // slot name (no '?') -> kind or class URI
};

// Template file: {"templates": [{id, phrases: [...],
// goal: ["(filled ?h)", ...], slots: {"?h": "uri"}}]}.
// Throws ParseError on malformed JSON and ValidationError when a goal
// variable has no slot entry, a phrase list is empty, or a URI is not
// namespaced.
std::vector<GoalTemplate> load_templates(std::string_view text);

struct GroundedGoal {
  Symbol template_id;
  std::map<std::string, Symbol> bindings;  // slot name -> object id
  std::vector<pddl::GroundLiteral> goal;
  double score = 0.0;
};

// Tokenization used for matching: lowercase, punctuation stripped,
// split on non-alphanumerics. Exposed so callers can reproduce scores.
std::vector<std::string> tokenize(std::string_view text);

// Jaccard similarity of two token multisets treated as sets.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Pick the template whose best phrase maximizes Jaccard similarity with
// the utterance (tokens spelled like a slot of that template are dropped
// from the phrase side), then bind each slot to the unique scene instance
// whose kind URI is, per the ontology, a subclass of the slot restriction.
//
// Throws NoMatchError when the best score is below tau, AmbiguousMatchError
// on a float-equal tie at the top, and AmbiguousBindingError when a slot
// has zero or several candidates.
GroundedGoal match(const std::string& utterance, const std::vector<GoalTemplate>& templates,
                   const scene::SceneState& scene, const std::vector<scene::ObjectKind>& kinds,
                   const Ontology& ontology, double tau = 0.5);

// Goal inferred from a demonstration: the facts present in the final frame
// but absent from the initial one. Throws EmptyDemoDiffError when the two
// frames are symbolically identical.
std::vector<pddl::GroundLiteral> goal_from_demo(const scene::SceneState& initial,
                                                const scene::SceneState& final_frame);

}  // namespace maestrob
