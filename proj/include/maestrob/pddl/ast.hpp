#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "maestrob/fact.hpp"
#include "maestrob/symbol.hpp"

// Value types for the planning dialect: STRIPS with :typing, negative
// preconditions/goals, and an optional (:context ...) block that binds
// symbols to ontology URIs. Values are canonicalized (collections sorted,
// symbols lowercased) by the parser/validator, so equal values compare
// equal field-by-field and print byte-identically.
namespace maestrob::pddl {

struct Param {
  std::string var;  // without the leading '?'
  Symbol type;
  auto operator<=>(const Param&) const = default;
};

struct TypeDecl {
  Symbol name;
  Symbol parent;  // defaults to `object`
  auto operator<=>(const TypeDecl&) const = default;
};

struct Term {
  enum class Kind { Variable, Constant };
  Kind kind = Kind::Constant;
  std::string name;  // variable name without '?', or a constant symbol
  auto operator<=>(const Term&) const = default;
};

struct Atom {
  Symbol predicate;
  std::vector<Term> args;
  auto operator<=>(const Atom&) const = default;
};

struct Literal {
  bool positive = true;
  Atom atom;
  auto operator<=>(const Literal&) const = default;
};

struct PredicateDecl {
  Symbol name;
  std::vector<Param> params;
  auto operator<=>(const PredicateDecl&) const = default;
};

struct ActionSchema {
  Symbol name;
  std::vector<Param> params;          // declaration order is binding order
  std::vector<Literal> precondition;  // conjunction
  std::vector<Literal> effects;       // positive = add, negative = delete
  auto operator<=>(const ActionSchema&) const = default;
};

struct ContextBlock {
  std::map<Symbol, std::string> entries;  // symbol -> absolute URI, verbatim
  bool empty() const { return entries.empty(); }
  auto operator<=>(const ContextBlock&) const = default;
};

struct Domain {
  Symbol name;
  std::vector<TypeDecl> types;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;
  ContextBlock context;
  auto operator<=>(const Domain&) const = default;
};

struct GroundLiteral {
  Fact fact;
  bool positive = true;
  auto operator<=>(const GroundLiteral&) const = default;
};

struct Problem {
  Symbol name;
  Symbol domain_name;
  std::vector<std::pair<Symbol, Symbol>> objects;  // (object, type)
  std::vector<Fact> init;                          // positive ground atoms
  std::vector<GroundLiteral> goal;                 // conjunction
  ContextBlock context;
  auto operator<=>(const Problem&) const = default;
};

// Sorts collections, checks every structural invariant, and throws
// ValidationError on the first violation. parse_domain/parse_problem call
// these; code that builds or edits values directly must re-validate.
void validate_domain(Domain& d);
void validate_problem(Problem& p);

}  // namespace maestrob::pddl
