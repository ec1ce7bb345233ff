#pragma once

#include <string_view>

#include "maestrob/pddl/ast.hpp"

namespace maestrob::pddl {

// Parse UTF-8 s-expression source into validated, canonical values.
// `;` starts a comment running to end of line. Symbols are lowercased;
// URIs inside (:context ...) are preserved verbatim. A missing :context
// block yields an empty ContextBlock, so plain PDDL parses unchanged.
//
// Throws SyntaxError (with 1-based line/column) on malformed text and
// ValidationError on structurally invalid values.
Domain parse_domain(std::string_view text);
Problem parse_problem(std::string_view text);

// Parse one literal form such as `(filled ?h)` or `(not (on a b))`.
// Structural only: no predicate declarations are consulted.
Literal parse_single_literal(std::string_view text);

}  // namespace maestrob::pddl
