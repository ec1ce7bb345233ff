#include "maestrob/pddl/printer.hpp"

#include <sstream>

namespace maestrob::pddl {

namespace {

std::string term_str(const Term& t) {
  return t.kind == Term::Kind::Variable ? "?" + t.name : t.name;
}

std::string atom_str(const Atom& a) {
  std::ostringstream out;
  out << '(' << a.predicate;
  for (const Term& t : a.args) out << ' ' << term_str(t);
  out << ')';
  return out.str();
}

std::string params_str(const std::vector<Param>& params) {
  std::ostringstream out;
  out << '(';
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out << ' ';
    out << '?' << params[i].var << " - " << params[i].type;
  }
  out << ')';
  return out.str();
}

// Bare literal when singleton, (and ...) otherwise.
std::string conjunction_str(const std::vector<Literal>& ls) {
  if (ls.size() == 1) return to_string(ls[0]);
  std::ostringstream out;
  out << "(and";
  for (const Literal& l : ls) out << ' ' << to_string(l);
  out << ')';
  return out.str();
}

std::string goal_str(const std::vector<GroundLiteral>& ls) {
  if (ls.size() == 1) return to_string(ls[0]);
  std::ostringstream out;
  out << "(and";
  for (const GroundLiteral& l : ls) out << ' ' << to_string(l);
  out << ')';
  return out.str();
}

void write_context(std::ostringstream& out, const ContextBlock& ctx) {
  if (ctx.entries.empty()) return;
  out << "  (:context\n";
  for (const auto& [sym, uri] : ctx.entries) out << "    (" << sym << " \"" << uri << "\")\n";
  out << "  )\n";
}

}  // namespace

std::string to_string(const Fact& f) {
  std::ostringstream out;
  out << '(' << f.predicate;
  for (const Symbol& a : f.args) out << ' ' << a;
  out << ')';
  return out.str();
}

std::string to_string(const Literal& l) {
  return l.positive ? atom_str(l.atom) : "(not " + atom_str(l.atom) + ")";
}

std::string to_string(const GroundLiteral& l) {
  return l.positive ? to_string(l.fact) : "(not " + to_string(l.fact) + ")";
}

std::string print_domain(const Domain& d, bool emit_context) {
  bool negative = false;
  for (const ActionSchema& a : d.actions) {
    for (const Literal& l : a.precondition) negative = negative || !l.positive;
  }

  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  out << "  (:requirements :strips :typing";
  if (negative) out << " :negative-preconditions";
  out << ")\n";
  if (!d.types.empty()) {
    out << "  (:types\n";
    for (const TypeDecl& t : d.types) out << "    " << t.name << " - " << t.parent << "\n";
    out << "  )\n";
  }
  if (!d.predicates.empty()) {
    out << "  (:predicates\n";
    for (const PredicateDecl& p : d.predicates) {
      out << "    (" << p.name;
      for (const Param& par : p.params) out << " ?" << par.var << " - " << par.type;
      out << ")\n";
    }
    out << "  )\n";
  }
  if (emit_context) write_context(out, d.context);
  for (const ActionSchema& a : d.actions) {
    out << "  (:action " << a.name << "\n";
    out << "    :parameters " << params_str(a.params) << "\n";
    out << "    :precondition " << conjunction_str(a.precondition) << "\n";
    out << "    :effect " << conjunction_str(a.effects) << "\n";
    out << "  )\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const Problem& p, bool emit_context) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n";
  out << "  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) {
    out << "  (:objects\n";
    for (const auto& [obj, type] : p.objects) out << "    " << obj << " - " << type << "\n";
    out << "  )\n";
  }
  if (emit_context) write_context(out, p.context);
  if (!p.init.empty()) {
    out << "  (:init\n";
    for (const Fact& f : p.init) out << "    " << to_string(f) << "\n";
    out << "  )\n";
  }
  out << "  (:goal " << goal_str(p.goal) << ")\n";
  out << ")\n";
  return out.str();
}

}  // namespace maestrob::pddl
