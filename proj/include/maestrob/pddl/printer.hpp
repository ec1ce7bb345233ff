#pragma once

#include <string>

#include "maestrob/pddl/ast.hpp"

namespace maestrob::pddl {

// Canonical formatting: 2-space indent, one declaration per line, entries
// sorted by name (guaranteed for validated values). With emit_context =
// false the output contains no :context token and is plain PDDL.
// Equal values print to byte-identical text.
std::string print_domain(const Domain& d, bool emit_context = true);
std::string print_problem(const Problem& p, bool emit_context = true);

std::string to_string(const Literal& l);
std::string to_string(const GroundLiteral& l);
std::string to_string(const Fact& f);  // s-expression form `(pred a b)`

}  // namespace maestrob::pddl
